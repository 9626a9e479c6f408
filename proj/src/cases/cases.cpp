#include "spn/cases/cases.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spn/error.hpp"
#include "spn/rdf/vocab.hpp"
#include "spn/sparql/query.hpp"

namespace spn::cases {

namespace {

Term proj_term(const std::string& local) { return Term::iri(std::string(ns::proj) + local); }
Term spn_term(const char* local) { return Term::iri(ns::spn_(local)); }
Term bimsn_term(const char* local) { return Term::iri(ns::bimsn_(local)); }
Term rdf_type() { return Term::iri(ns::rdf_("type")); }

std::string local(const Term& t) {
  const std::string& v = t.value();
  if (v.rfind(ns::proj, 0) == 0) return "proj:" + v.substr(std::string(ns::proj).size());
  return "<" + v + ">";
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

const std::vector<Discipline> kDisciplines = {Discipline::ST, Discipline::AR, Discipline::MEP};

const char* kStateTags3[] = {"START", "ACTIVE", "END"};
const char* kStateTags2[] = {"START", "END"};

std::string state_tag(int states, std::size_t i) { return states == 3 ? kStateTags3[i] : kStateTags2[i]; }

struct GraphWriter {
  rdf::Graph& g;
  void add(const Term& s, const Term& p, const Term& o) { g.insert({s, p, o}); }

  Term sparql_rule(const Term& node, const std::string& text) {
    add(node, rdf_type(), spn_term("SPARQLRule"));
    add(node, spn_term("hasSPARQL"), Term::literal(text));
    return node;
  }

  Term compound(const Term& node, const std::string& op, const std::vector<Term>& subs) {
    add(node, rdf_type(), spn_term("CompoundRule"));
    add(node, spn_term("operator"), Term::literal(op));
    for (const auto& s : subs) add(node, spn_term("subRule"), s);
    return node;
  }

  void arc(const Term& iri, const char* cls, const Term& place, const Term& transition) {
    add(iri, rdf_type(), spn_term(cls));
    add(iri, spn_term("relPlace"), place);
    add(iri, spn_term("relTransition"), transition);
    add(iri, spn_term("hasArg"), Term::literal("?TOKEN"));
  }
};

}  // namespace

std::string to_string(Discipline d) {
  switch (d) {
    case Discipline::ST: return "ST";
    case Discipline::AR: return "AR";
    case Discipline::MEP: return "MEP";
  }
  return "";
}

std::string discipline_tag(Discipline d) {
  switch (d) {
    case Discipline::ST: return "STRUCT";
    case Discipline::AR: return "ARCH";
    case Discipline::MEP: return "MEP";
  }
  return "";
}

std::string discipline_name(Discipline d) {
  switch (d) {
    case Discipline::ST: return "Struct";
    case Discipline::AR: return "Arch";
    case Discipline::MEP: return "MEP";
  }
  return "";
}

Discipline parse_discipline(const std::string& s) {
  for (auto d : kDisciplines) {
    if (s == to_string(d) || s == discipline_tag(d)) return d;
  }
  throw SpecError("unknown discipline '" + s + "'");
}

std::vector<ScheduleEntry> parse_schedule(const std::string& text) {
  std::vector<ScheduleEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 4) throw SpecError("schedule line " + std::to_string(lineno) + ": expected 4 fields");
    if (out.empty() && cells[0] == "level") continue;
    ScheduleEntry e;
    e.level = cells[0];
    e.discipline = parse_discipline(cells[1]);
    try {
      e.start = std::stoll(cells[2]);
      e.end = std::stoll(cells[3]);
    } catch (const std::exception&) {
      throw SpecError("schedule line " + std::to_string(lineno) + ": ticks must be integers");
    }
    if (e.start > e.end) throw SpecError("schedule line " + std::to_string(lineno) + ": start after end");
    out.push_back(e);
  }
  return out;
}

std::string schedule_csv(const std::vector<ScheduleEntry>& s) {
  std::string out = "level,discipline,start,end\n";
  for (const auto& e : s) {
    out += e.level + "," + to_string(e.discipline) + "," + std::to_string(e.start) + "," + std::to_string(e.end) + "\n";
  }
  return out;
}

SyntheticBuilding SyntheticBuilding::desk() {
  SyntheticBuilding b;
  b.levels = 2;
  b.categories = {
      {"wall", Discipline::ST, 3, 6, std::nullopt, std::nullopt},
      {"slab", Discipline::ST, 3, 2, std::nullopt, std::nullopt},
      {"column", Discipline::ST, 2, 6, std::nullopt, std::nullopt},
      {"opening", Discipline::AR, 2, 6, std::string("wall"), std::nullopt},
      {"window", Discipline::AR, 2, 4, std::string("opening"), std::nullopt},
      {"door", Discipline::AR, 2, 2, std::string("opening"), std::nullopt},
      {"pipe", Discipline::MEP, 2, 4, std::nullopt, std::nullopt},
  };
  return b;
}

SyntheticBuilding parse_building(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("building config: ") + e.what());
  }
  SyntheticBuilding b;
  try {
    b.levels = j.value("levels", std::size_t{2});
    b.max_fires_per_tick = j.value("max_fires_per_tick", std::size_t{4});
    b.min_ticks_between_moves = j.value("min_ticks_between_moves", std::size_t{1});
    if (!j.contains("categories")) {
      b.categories = SyntheticBuilding::desk().categories;
      return b;
    }
    for (const auto& c : j.at("categories")) {
      Category cat;
      cat.name = c.at("name").get<std::string>();
      cat.discipline = parse_discipline(c.at("discipline").get<std::string>());
      cat.states = c.value("states", 2);
      cat.per_level = c.value("per_level", std::size_t{0});
      if (c.contains("host")) cat.host = c.at("host").get<std::string>();
      if (c.contains("max_in_process")) cat.max_in_process = c.at("max_in_process").get<std::size_t>();
      b.categories.push_back(cat);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("building config: ") + e.what());
  }
  return b;
}

std::string building_json(const SyntheticBuilding& b) {
  nlohmann::json j;
  j["levels"] = b.levels;
  j["max_fires_per_tick"] = b.max_fires_per_tick;
  j["min_ticks_between_moves"] = b.min_ticks_between_moves;
  j["categories"] = nlohmann::json::array();
  for (const auto& c : b.categories) {
    nlohmann::json jc{{"name", c.name}, {"discipline", to_string(c.discipline)}, {"states", c.states},
                      {"per_level", c.per_level}};
    if (c.host) jc["host"] = *c.host;
    if (c.max_in_process) jc["max_in_process"] = *c.max_in_process;
    j["categories"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

std::vector<ScheduleEntry> default_schedule(const SyntheticBuilding& b) {
  std::vector<ScheduleEntry> out;
  for (std::size_t i = 0; i < b.levels; ++i) {
    const long long base = static_cast<long long>(i) * 10;
    out.push_back({level_name(i), Discipline::ST, base, base + 40});
    out.push_back({level_name(i), Discipline::AR, base + 5, base + 70});
    out.push_back({level_name(i), Discipline::MEP, base + 5, base + 80});
  }
  return out;
}

std::string level_name(std::size_t i) { return "L" + std::to_string(i + 1); }

std::vector<std::string> state_names(int states) {
  if (states == 3) return {"NotStarted", "InProcessing", "Finished"};
  return {"Uninstalled", "Installed"};
}

Term object_place(const std::string& category, const std::string& state) {
  return proj_term("P_" + category + "_" + state);
}

Term level_place(Discipline d, const std::string& state) {
  return proj_term("P_" + to_string(d) + "_Level_" + state);
}

Term object_transition(const std::string& category, const std::string& step) {
  return proj_term("T_" + category + "_" + step);
}

Term level_transition(const std::string& step, Discipline d) {
  return proj_term("T_Level_" + step + "_" + discipline_name(d));
}

Term object_iri(const std::string& level, const std::string& category, std::size_t i) {
  return proj_term(level + "_" + category + "_" + std::to_string(i));
}

Term level_iri(const std::string& level) { return proj_term(level); }

namespace {

void check_building(const SyntheticBuilding& b) {
  std::map<std::string, const Category*> by_name;
  for (const auto& c : b.categories) {
    if (c.states != 2 && c.states != 3) throw SpecError("category " + c.name + ": states must be 2 or 3");
    if (c.name.empty() || c.name.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789") !=
                              std::string::npos) {
      throw SpecError("category name '" + c.name + "' must be alphanumeric");
    }
    if (!by_name.emplace(c.name, &c).second) throw SpecError("duplicate category " + c.name);
  }
  for (const auto& c : b.categories) {
    std::set<std::string> chain{c.name};
    const Category* cur = &c;
    while (cur->host) {
      auto it = by_name.find(*cur->host);
      if (it == by_name.end()) throw SpecError("category " + cur->name + ": unknown host " + *cur->host);
      if (cur->per_level > 0 && it->second->per_level == 0) {
        throw SpecError("category " + cur->name + ": host " + *cur->host + " has no objects");
      }
      if (!chain.insert(*cur->host).second) throw SpecError("host chain through " + c.name + " is cyclic");
      cur = it->second;
    }
  }
}

// Guard leaves shared by every object transition of a category: the level
// phase is active and its schedule window is still open.
std::string window_query(const Category& c) {
  const std::string tag = discipline_tag(c.discipline);
  return "ASK { ?lvl ifc4:containsElements/ifc4:RelatedElements ?TOKEN . " + local(level_place(c.discipline, "Active")) +
         " ldp:contains ?lvl . ?ph bimsn:level ?lvl . ?ph bimsn:discipline \"" + tag +
         "\" . ?ph bimsn:endTick ?e . spnx:clock spnx:currentTick ?t . FILTER (?t <= ?e) }";
}

}  // namespace

rdf::Graph generate_case1(const SyntheticBuilding& b, const std::vector<ScheduleEntry>& schedule) {
  check_building(b);
  std::map<std::string, const Category*> by_name;
  for (const auto& c : b.categories) by_name[c.name] = &c;
  std::set<std::string> levels;
  for (std::size_t i = 0; i < b.levels; ++i) levels.insert(level_name(i));
  for (const auto& e : schedule) {
    if (!levels.count(e.level)) throw SpecError("schedule names unknown level " + e.level);
    if (e.start > e.end) throw SpecError("schedule entry for " + e.level + " starts after it ends");
  }

  rdf::Graph g = rdf::Graph::with_default_prefixes();
  GraphWriter w{g};
  const Term ifc_storey = Term::iri(ns::ifc4_("IfcBuildingStorey"));
  const Term contains_elements = Term::iri(ns::ifc4_("containsElements"));
  const Term related = Term::iri(ns::ifc4_("RelatedElements"));
  const Term hosted_by = bimsn_term("hostedBy");
  const Term dtag = bimsn_term("disciplineTag");
  const Term stag = bimsn_term("stateTag");
  const Term shares = Term::iri(ns::spnx_("sharesTokens"));
  const Term quota = Term::iri(ns::spnx_("maxFiresPerTick"));
  const Term spacing = Term::iri(ns::spnx_("minTicksBetweenMoves"));
  const Term max_tokens = Term::iri(ns::spnx_("maxTokens"));

  // Domain: levels, containment, hosts, schedule phases.
  for (std::size_t i = 0; i < b.levels; ++i) {
    const std::string lv = level_name(i);
    const Term level = level_iri(lv);
    const Term rel = proj_term(lv + "_contents");
    w.add(level, rdf_type(), ifc_storey);
    w.add(level, contains_elements, rel);
    for (const auto& c : b.categories) {
      for (std::size_t k = 1; k <= c.per_level; ++k) {
        const Term obj = object_iri(lv, c.name, k);
        w.add(obj, rdf_type(), proj_term(c.name));
        w.add(rel, related, obj);
        if (c.host) {
          const auto& h = *by_name.at(*c.host);
          w.add(obj, hosted_by, object_iri(lv, h.name, (k - 1) % h.per_level + 1));
        }
      }
    }
  }
  for (const auto& e : schedule) {
    const Term ph = proj_term(e.level + "_" + to_string(e.discipline) + "_phase");
    w.add(ph, rdf_type(), bimsn_term("Phase"));
    w.add(ph, bimsn_term("level"), level_iri(e.level));
    w.add(ph, bimsn_term("discipline"), Term::literal(discipline_tag(e.discipline)));
    w.add(ph, bimsn_term("startTick"), Term::integer(e.start));
    w.add(ph, bimsn_term("endTick"), Term::integer(e.end));
  }

  // Level-phase places and transitions per discipline.
  const char* phase_states[] = {"Start", "Active", "End"};
  for (auto d : kDisciplines) {
    const std::string tag = discipline_tag(d);
    for (std::size_t s = 0; s < 3; ++s) {
      const Term p = level_place(d, phase_states[s]);
      w.add(p, rdf_type(), spn_term("Place"));
      w.add(p, dtag, Term::literal(tag));
      w.add(p, stag, Term::literal(kStateTags3[s]));
      w.add(p, shares, Term::boolean(true));
    }
    const Term start_place = level_place(d, "Start");
    const Term init = proj_term("R_init_levels_" + to_string(d));
    w.sparql_rule(init, "SELECT ?x { ?x a ifc4:IfcBuildingStorey }");
    w.add(start_place, spn_term("initRule"), init);

    const Term t_start = level_transition("Start", d);
    w.add(t_start, rdf_type(), spn_term("Transition"));
    w.add(t_start, spn_term("hasArg"), Term::literal("?TOKEN"));
    w.add(t_start, dtag, Term::literal(tag));
    w.add(t_start, spacing, Term::integer(0));
    w.add(t_start, spn_term("guardRule"),
          w.sparql_rule(proj_term("R_" + t_start.value().substr(std::string(ns::proj).size())),
                        "ASK { ?ph bimsn:level ?TOKEN . ?ph bimsn:discipline \"" + tag +
                            "\" . ?ph bimsn:startTick ?s . spnx:clock spnx:currentTick ?t . FILTER (?t >= ?s) }"));
    w.arc(proj_term("A_Level_Start_" + to_string(d) + "_in"), "ArcP2T", start_place, t_start);
    w.arc(proj_term("A_Level_Start_" + to_string(d) + "_out"), "ArcT2P", level_place(d, "Active"), t_start);

    // Level end: the printed level-end pattern, parameterized by discipline.
    const Term t_end = level_transition("End", d);
    const std::string end_name = t_end.value().substr(std::string(ns::proj).size());
    w.add(t_end, rdf_type(), spn_term("Transition"));
    w.add(t_end, spn_term("hasArg"), Term::literal("?TOKEN"));
    w.add(t_end, dtag, Term::literal(tag));
    w.add(t_end, spacing, Term::integer(0));
    const Term leaf = w.sparql_rule(proj_term("R_" + end_name + "_open"),
                                    "ASK {\n"
                                    "  ?place a spn:Place.\n"
                                    "  ?place bimsn:disciplineTag ?dTag1.\n"
                                    "  ?SELF bimsn:disciplineTag ?dTag2.\n"
                                    "  ?place bimsn:stateTag ?sTag.\n"
                                    "  FILTER (?dTag1 = ?dTag2 && ?sTag != 'END')\n"
                                    "  ?TOKEN ifc4:containsElements/ifc4:RelatedElements ?elem.\n"
                                    "  ?place ldp:contains ?elem. }");
    w.add(t_end, spn_term("guardRule"), w.compound(proj_term("R_" + end_name), "NOT", {leaf}));
    w.arc(proj_term("A_Level_End_" + to_string(d) + "_in"), "ArcP2T", level_place(d, "Active"), t_end);
    w.arc(proj_term("A_Level_End_" + to_string(d) + "_out"), "ArcT2P", level_place(d, "End"), t_end);
  }

  // Object state chains.
  for (const auto& c : b.categories) {
    const auto states = state_names(c.states);
    const std::string tag = discipline_tag(c.discipline);
    for (std::size_t s = 0; s < states.size(); ++s) {
      const Term p = object_place(c.name, states[s]);
      w.add(p, rdf_type(), spn_term("Place"));
      w.add(p, dtag, Term::literal(tag));
      w.add(p, stag, Term::literal(state_tag(c.states, s)));
      if (c.max_in_process && c.states == 3 && s == 1) w.add(p, max_tokens, Term::integer(*c.max_in_process));
    }
    const Term init = proj_term("R_init_" + c.name);
    w.sparql_rule(init, "SELECT ?x { ?x a proj:" + c.name + " }");
    w.add(object_place(c.name, states[0]), spn_term("initRule"), init);

    // Categories this one hosts.
    std::vector<const Category*> dependents;
    for (const auto& d : b.categories) {
      if (d.host && *d.host == c.name) dependents.push_back(&d);
    }

    const std::vector<std::string> steps = c.states == 3 ? std::vector<std::string>{"Start", "Finish"}
                                                         : std::vector<std::string>{"Install"};
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const Term t = object_transition(c.name, steps[s]);
      const std::string tname = "T_" + c.name + "_" + steps[s];
      w.add(t, rdf_type(), spn_term("Transition"));
      w.add(t, spn_term("hasArg"), Term::literal("?TOKEN"));
      w.add(t, dtag, Term::literal(tag));
      w.add(t, quota, Term::integer(static_cast<long long>(b.max_fires_per_tick)));
      w.add(t, spacing, Term::integer(static_cast<long long>(b.min_ticks_between_moves)));
      w.arc(proj_term("A_" + c.name + "_" + steps[s] + "_in"), "ArcP2T", object_place(c.name, states[s]), t);
      w.arc(proj_term("A_" + c.name + "_" + steps[s] + "_out"), "ArcT2P", object_place(c.name, states[s + 1]), t);

      std::vector<Term> leaves;
      leaves.push_back(w.sparql_rule(proj_term("R_" + tname + "_window"), window_query(c)));
      if (c.host && s == 0) {
        const Category* h = by_name.at(*c.host);
        std::string q = "ASK { ?TOKEN bimsn:hostedBy ?h0 . ";
        if (h->states == 3) {
          // Hosted objects go in while the host is under construction.
          q += local(object_place(h->name, "InProcessing")) + " ldp:contains ?h0 . }";
        } else {
          // Otherwise every host up the chain must be done.
          std::size_t k = 0;
          for (const Category* cur = h; cur; ++k) {
            const std::string v = "?h" + std::to_string(k);
            q += local(object_place(cur->name, state_names(cur->states).back())) + " ldp:contains " + v + " . ";
            if (!cur->host) break;
            q += v + " bimsn:hostedBy ?h" + std::to_string(k + 1) + " . ";
            cur = by_name.at(*cur->host);
          }
          q += "}";
        }
        leaves.push_back(w.sparql_rule(proj_term("R_" + tname + "_host"), q));
      }
      if (c.states == 3 && s == 1) {
        for (const Category* d : dependents) {
          const auto dstates = state_names(d->states);
          for (std::size_t ds = 0; ds + 1 < dstates.size(); ++ds) {
            const std::string base = "R_" + tname + "_" + d->name + "_" + dstates[ds];
            const Term ask = w.sparql_rule(proj_term(base + "_any"),
                                           "ASK { ?d bimsn:hostedBy ?TOKEN . " +
                                               local(object_place(d->name, dstates[ds])) + " ldp:contains ?d . }");
            leaves.push_back(w.compound(proj_term(base), "NOT", {ask}));
          }
        }
      }
      w.add(t, spn_term("guardRule"), leaves.size() == 1 ? leaves[0] : w.compound(proj_term("R_" + tname), "AND", leaves));
    }
  }
  return g;
}

runtime::EngineConfig case1_config(long long ticks, std::uint64_t seed) {
  runtime::EngineConfig cfg;
  cfg.max_ticks = ticks;
  cfg.seed = seed;
  return cfg;
}

int chain_rank(const model::SpnModel& m, const Term& place) {
  auto it = m.places.find(place);
  if (it == m.places.end()) return -1;
  auto tag = model::annotation(it->second.annotations, ns::bimsn_("stateTag"));
  if (!tag) return -1;
  if (tag->value() == "START") return 0;
  if (tag->value() == "ACTIVE") return 1;
  if (tag->value() == "END") return 2;
  return -1;
}

bool is_case1_model(const model::SpnModel& m) {
  for (const auto& [iri, p] : m.places) {
    if (chain_rank(m, iri) >= 0) return true;
  }
  return false;
}

Case1Result run_case1(const rdf::Graph& g, const runtime::EngineConfig& config) {
  runtime::Engine e(model::load_model(g), config);
  e.init_marking();
  e.run();
  return assess_case1(e);
}

Case1Result assess_case1(const runtime::Engine& e) {
  Case1Result r;
  r.stats = e.stats();
  r.events = e.events();
  r.final_marking = e.marking();

  const auto& m = e.model();
  for (const auto& [place, tokens] : r.final_marking) {
    if (chain_rank(m, place) == 2 || chain_rank(m, place) < 0) continue;
    for (const auto& tok : tokens) {
      Stuck s{place, tok, Term(), {}, "constraint"};
      for (const auto* a : m.arcs_at(place)) {
        if (a->direction != model::Direction::P2T) continue;
        const auto& t = m.transitions.at(a->transition);
        s.transition = t.iri;
        if (!t.guard) break;
        const sparql::Solution b{{"TOKEN", tok}};
        if (model::eval_boolean(*t.guard, e.graph(), b, t.iri)) break;
        s.reason = "guard";
        const auto* c = t.guard->as<model::CompoundRule>();
        if (c && c->op == model::LogicOp::And) {
          for (const auto& sub : c->subrules) {
            if (!model::eval_boolean(sub, e.graph(), b, t.iri)) s.blocking.push_back(sub.node());
          }
        } else {
          s.blocking.push_back(t.guard->node());
        }
        break;
      }
      r.stuck.push_back(s);
    }
  }
  r.feasible = r.stuck.empty();
  return r;
}

std::string verdict_json(const Case1Result& r) {
  nlohmann::json j;
  j["verdict"] = r.feasible ? "FEASIBLE" : "INFEASIBLE";
  j["ticks"] = r.stats.ticks_elapsed;
  j["firings"] = r.stats.firings;
  j["rule_checks"] = r.stats.rule_checks;
  j["stuck"] = nlohmann::json::array();
  for (const auto& s : r.stuck) {
    auto blocking = nlohmann::json::array();
    for (const auto& b : s.blocking) blocking.push_back(b.value());
    j["stuck"].push_back({{"token", s.token.value()},
                          {"place", s.place.value()},
                          {"transition", s.transition.value()},
                          {"reason", s.reason},
                          {"blocking", blocking}});
  }
  return j.dump(2) + "\n";
}

namespace {

model::Rule renode(const model::Rule& r, const std::string& base, std::size_t& counter) {
  const Term node = proj_term(counter == 0 ? base : base + "_" + std::to_string(counter));
  ++counter;
  if (auto* c = r.as<model::CompoundRule>()) {
    model::CompoundRule out{c->op, {}};
    for (const auto& sub : c->subrules) out.subrules.push_back(renode(sub, base, counter));
    return model::Rule(node, out);
  }
  if (auto* c = r.as<model::ConditionRule>()) {
    auto i = renode(*c->if_rule, base, counter);
    auto t = renode(*c->then_rule, base, counter);
    auto e = renode(*c->else_rule, base, counter);
    return model::Rule(node, model::ConditionRule{i, t, e});
  }
  return model::Rule(node, r.body());
}

model::Rule text_rule(const std::string& text, const Term& node, const rdf::PrefixMap& prefixes) {
  const std::string t = trim(text);
  if (t == "true" || t == "false") return model::Rule(node, model::ConstantRule{Term::boolean(t == "true")});
  return model::Rule(node, model::SparqlRule{t, sparql::parse_sparql(t, prefixes)});
}

}  // namespace

CheckingPipe build_pipe(const std::string& name, const Term& root_class, model::Rule applicability,
                        model::Rule constraint) {
  for (const auto* r : {&applicability, &constraint}) {
    if (model::infer_type(*r) == model::ValueType::TermSet) {
      throw TypeError("pipe " + name + ": rule " + r->node().to_ntriples() + " is not boolean");
    }
  }
  const std::string base = "pipe_" + name;
  std::size_t n = 0;
  auto app = renode(applicability, base + "_applicability", n);
  n = 0;
  auto con = renode(constraint, base + "_constraint", n);
  return CheckingPipe{name, root_class, app, con, proj_term(base + "_P1"), proj_term(base + "_P2"),
                      proj_term(base + "_P3")};
}

CheckingPipe build_pipe(const std::string& name, const Term& root_class, const std::string& applicability,
                        const std::string& constraint, const rdf::PrefixMap& prefixes) {
  return build_pipe(name, root_class, text_rule(applicability, proj_term("pipe_rule"), prefixes),
                    text_rule(constraint, proj_term("pipe_rule"), prefixes));
}

PipeReport run_pipes(const std::vector<CheckingPipe>& pipes, const rdf::Graph& data) {
  rdf::Graph g = data;
  for (const auto& [k, v] : ns::default_prefixes()) g.prefixes().emplace(k, v);
  GraphWriter w{g};
  const Term shares = Term::iri(ns::spnx_("sharesTokens"));
  std::set<std::string> names;
  for (const auto& p : pipes) {
    if (!names.insert(p.name).second) throw SpecError("duplicate pipe " + p.name);
    for (const auto& place : {p.p1, p.p2, p.p3}) {
      w.add(place, rdf_type(), spn_term("Place"));
      w.add(place, shares, Term::boolean(true));
    }
    const std::string base = "pipe_" + p.name;
    w.add(p.p1, spn_term("initRule"),
          w.sparql_rule(proj_term(base + "_roots"), "SELECT ?x { ?x a <" + p.root_class.value() + "> }"));
    const Term t_app = proj_term(base + "_T_applicability");
    const Term t_con = proj_term(base + "_T_constraint");
    for (const auto& [t, rule] : {std::pair{t_app, &p.applicability}, std::pair{t_con, &p.constraint}}) {
      w.add(t, rdf_type(), spn_term("Transition"));
      w.add(t, spn_term("hasArg"), Term::literal("?TOKEN"));
      w.add(t, spn_term("guardRule"), rule->node());
      for (const auto& tr : model::rule_to_rdf(*rule)) g.insert(tr);
    }
    w.arc(proj_term(base + "_A1"), "ArcP2T", p.p1, t_app);
    w.arc(proj_term(base + "_A2"), "ArcT2P", p.p2, t_app);
    w.arc(proj_term(base + "_A3"), "ArcP2T", p.p2, t_con);
    w.arc(proj_term(base + "_A4"), "ArcT2P", p.p3, t_con);
  }

  PipeReport report;
  if (pipes.empty()) return report;
  runtime::EngineConfig cfg;
  cfg.max_ticks = 10;
  runtime::Engine e(model::load_model(std::move(g)), cfg);
  e.keep_events(false);
  e.init_marking();
  const auto intake = e.marking();
  report.stats = e.run();
  const auto final = e.marking();
  for (const auto& p : pipes) {
    PipeResult r;
    r.name = p.name;
    r.intake = intake.at(p.p1).size();
    r.passed = final.at(p.p3).size();
    r.applicable = r.passed + final.at(p.p2).size();
    r.failed.assign(final.at(p.p2).begin(), final.at(p.p2).end());
    report.pipes.push_back(r);
  }
  std::sort(report.pipes.begin(), report.pipes.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return report;
}

std::string pipe_report_json(const PipeReport& r) {
  nlohmann::json j;
  j["pipes"] = nlohmann::json::array();
  for (const auto& p : r.pipes) {
    auto failed = nlohmann::json::array();
    for (const auto& f : p.failed) failed.push_back(f.value());
    j["pipes"].push_back({{"name", p.name},
                          {"intake", p.intake},
                          {"applicable", p.applicable},
                          {"passed", p.passed},
                          {"failed", failed}});
  }
  j["firings"] = r.stats.firings;
  j["rule_checks"] = r.stats.rule_checks;
  return j.dump(2) + "\n";
}

std::vector<CheckingPipe> parse_pipes(const std::string& json_text, const rdf::PrefixMap& prefixes) {
  std::vector<CheckingPipe> out;
  try {
    for (const auto& p : nlohmann::json::parse(json_text)) {
      std::string cls = p.at("root_class").get<std::string>();
      Term root;
      if (auto colon = cls.find(':'); colon != std::string::npos && prefixes.count(cls.substr(0, colon)) &&
                                      cls.find("://") == std::string::npos) {
        root = Term::iri(prefixes.at(cls.substr(0, colon)) + cls.substr(colon + 1));
      } else {
        root = Term::iri(cls);
      }
      out.push_back(build_pipe(p.at("name").get<std::string>(), root, p.value("applicability", std::string("true")),
                               p.value("constraint", std::string("true")), prefixes));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("pipe definitions: ") + e.what());
  }
  return out;
}

rdf::Graph pipe_demo_data(std::size_t entities, std::size_t classes, std::uint64_t seed) {
  rdf::Graph g = rdf::Graph::with_default_prefixes();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution has(0.6);
  for (std::size_t i = 0; i < entities; ++i) {
    const Term e = proj_term("ent_" + std::to_string(i));
    g.insert({e, rdf_type(), proj_term("C" + std::to_string(i % std::max<std::size_t>(classes, 1)))});
    for (int k = 0; k < 4; ++k) {
      if (has(rng)) g.insert({e, proj_term("p" + std::to_string(k)), Term::integer(static_cast<long long>(i))});
    }
  }
  return g;
}

std::vector<CheckingPipe> pipe_demo_pipes(std::size_t count, std::size_t classes) {
  std::vector<CheckingPipe> out;
  const auto prefixes = ns::default_prefixes();
  for (std::size_t j = 0; j < count; ++j) {
    const std::string app =
        j % 3 == 0 ? "true" : "ASK { ?TOKEN proj:p" + std::to_string((j + 1) % 4) + " ?v }";
    const std::string con = "ASK { ?TOKEN proj:p" + std::to_string(j % 4) + " ?v }";
    char name[32];
    std::snprintf(name, sizeof name, "%03zu", j);
    out.push_back(build_pipe(name, proj_term("C" + std::to_string(j % std::max<std::size_t>(classes, 1))), app, con,
                             prefixes));
  }
  return out;
}

}  // namespace spn::cases
