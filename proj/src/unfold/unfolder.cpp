#include "spn/unfold/unfolder.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <unordered_map>

#include <json.hpp>

#include "spn/error.hpp"
#include "spn/rdf/vocab.hpp"
#include "spn/sparql/query.hpp"

namespace spn::unfold {

namespace {

using model::SpnModel;
using sparql::Query;
using sparql::TriplePattern;

Term iri(const std::string& v) { return Term::iri(v); }
Term spn_term(const char* local) { return iri(ns::spn_(local)); }
Term spnx_term(const std::string& local) { return iri(std::string(ns::spnx) + local); }
Term contains_pred() { return iri(ns::ldp_("contains")); }
Term rdf_type() { return iri(ns::rdf_("type")); }

std::vector<const model::Rule*> all_rules(const SpnModel& m) {
  std::vector<const model::Rule*> out;
  for (const auto& [i, p] : m.places) {
    if (p.color_rule) out.push_back(&*p.color_rule);
    if (p.init_rule) out.push_back(&*p.init_rule);
  }
  for (const auto& [i, t] : m.transitions) {
    if (t.guard) out.push_back(&*t.guard);
  }
  for (const auto& [i, a] : m.arcs) {
    if (a.expr) out.push_back(&*a.expr);
  }
  return out;
}

bool has_variable_predicate(const model::Rule& r) {
  for (const auto* leaf : model::sparql_leaves(r)) {
    for (const auto& tp : leaf->query.pattern.triples) {
      if (std::holds_alternative<sparql::Variable>(tp.predicate)) return true;
    }
  }
  return false;
}

// Direct-container places grouped by member relation: relation -> subject -> place.
std::map<Term, std::map<Term, Term>> member_places(const SpnModel& m) {
  std::map<Term, std::map<Term, Term>> out;
  for (const auto& [iri_, p] : m.places) {
    auto resource = model::annotation(p.annotations, ns::ldp_("membershipResource"));
    auto relation = model::annotation(p.annotations, ns::ldp_("hasMemberRelation"));
    if (resource && relation) out[*relation][*resource] = iri_;
  }
  return out;
}

bool is_read_arc(const model::ArcDef& a) {
  auto v = model::annotation(a.annotations, runtime::engine_terms::read_arc().value());
  return v && v->as_boolean().value_or(false);
}

std::string sparql_iri(const Term& t) { return "<" + t.value() + ">"; }

std::set<std::string> pattern_vars(const TriplePattern& tp) {
  std::set<std::string> out;
  if (auto* v = std::get_if<sparql::Variable>(&tp.subject)) out.insert(v->name);
  if (auto* v = std::get_if<sparql::Variable>(&tp.predicate)) out.insert(v->name);
  if (auto* v = std::get_if<sparql::Variable>(&tp.object)) out.insert(v->name);
  return out;
}

void filter_vars(const sparql::FilterExpr& f, std::set<std::string>& out) {
  if (f.kind == sparql::FilterKind::Operand) {
    if (auto* v = std::get_if<sparql::Variable>(&f.operand)) out.insert(v->name);
    return;
  }
  for (const auto& a : f.args) filter_vars(a, out);
}

}  // namespace

MutableDeclaration read_declaration(const rdf::Graph& g) {
  MutableDeclaration d;
  for (const auto& node : g.subjects(rdf_type(), spnx_term("MutablePredicate"))) {
    auto pred = g.object(node, spnx_term("predicate"));
    if (!pred || !pred->is_iri()) throw SpecError("mutable predicate " + node.to_ntriples() + " has no spnx:predicate");
    MutablePredicate mp;
    mp.predicate = *pred;
    if (auto e = g.object(node, spnx_term("editable"))) mp.editable = e->as_boolean().value_or(false);
    mp.value_class = g.object(node, spnx_term("valueClass"));
    d.predicates.push_back(mp);
  }
  std::sort(d.predicates.begin(), d.predicates.end(),
            [](const auto& a, const auto& b) { return a.predicate < b.predicate; });
  return d;
}

model::SpnModel internalize_domain(const model::SpnModel& m, const MutableDeclaration& decl) {
  const std::vector<Term> runtime_preds = {runtime::engine_terms::current_tick(),
                                           runtime::engine_terms::last_move_tick(),
                                           runtime::engine_terms::fires_in_tick()};
  bool any_frozen_mutable = false;
  for (const auto& mp : decl.predicates) any_frozen_mutable |= !mp.editable;
  for (const auto* r : all_rules(m)) {
    for (const auto& p : runtime_preds) {
      if (model::reads_predicate(*r, p)) {
        throw NonInternalizableError("rule " + r->node().to_ntriples() + " reads " + p.to_ntriples());
      }
    }
    for (const auto& mp : decl.predicates) {
      if (!mp.editable && model::reads_predicate(*r, mp.predicate)) {
        throw NonInternalizableError("rule " + r->node().to_ntriples() + " reads non-editable " +
                                     mp.predicate.to_ntriples());
      }
    }
    if (any_frozen_mutable && has_variable_predicate(*r)) {
      throw NonInternalizableError("rule " + r->node().to_ntriples() + " has a variable predicate");
    }
  }

  rdf::Graph g = m.graph;
  std::size_t n = 0;
  bool changed = false;
  for (const auto& mp : decl.predicates) {
    if (!mp.editable) continue;
    std::set<Term> subjects;
    for (const auto& t : m.graph.match(std::nullopt, mp.predicate, std::nullopt)) subjects.insert(t.subject);
    for (const auto& s : subjects) {
      changed = true;
      const std::string base = "dc_" + std::to_string(n++);
      const Term place = spnx_term(base);
      g.insert({place, rdf_type(), spn_term("Place")});
      g.insert({place, iri(ns::ldp_("membershipResource")), s});
      g.insert({place, iri(ns::ldp_("hasMemberRelation")), mp.predicate});
      g.insert({place, runtime::engine_terms::shares_tokens(), Term::boolean(true)});

      const Term del = spnx_term(base + "_delete");
      const Term del_arc = spnx_term(base + "_delete_arc");
      g.insert({del, rdf_type(), spn_term("Transition")});
      g.insert({del, spn_term("hasArg"), Term::literal("?v")});
      g.insert({del_arc, rdf_type(), spn_term("ArcP2T")});
      g.insert({del_arc, spn_term("relPlace"), place});
      g.insert({del_arc, spn_term("relTransition"), del});
      g.insert({del_arc, spn_term("hasArg"), Term::literal("?v")});

      if (!mp.value_class) continue;
      const Term ins = spnx_term(base + "_insert");
      const Term guard = spnx_term(base + "_insert_guard");
      const Term guard_leaf = spnx_term(base + "_insert_guard_leaf");
      const Term ins_arc = spnx_term(base + "_insert_arc");
      const Term ins_expr = spnx_term(base + "_insert_expr");
      g.insert({ins, rdf_type(), spn_term("Transition")});
      g.insert({ins, spn_term("hasArg"), Term::literal("?v")});
      g.insert({ins, spn_term("guardRule"), guard});
      g.insert({guard, rdf_type(), spn_term("CompoundRule")});
      g.insert({guard, spn_term("operator"), Term::literal("NOT")});
      g.insert({guard, spn_term("subRule"), guard_leaf});
      g.insert({guard_leaf, rdf_type(), spn_term("SPARQLRule")});
      g.insert({guard_leaf, spn_term("hasSPARQL"),
                Term::literal("ASK { " + sparql_iri(place) + " " + sparql_iri(contains_pred()) + " ?v }")});
      g.insert({ins_arc, rdf_type(), spn_term("ArcT2P")});
      g.insert({ins_arc, spn_term("relPlace"), place});
      g.insert({ins_arc, spn_term("relTransition"), ins});
      g.insert({ins_arc, spn_term("hasArg"), Term::literal("?v")});
      g.insert({ins_arc, spn_term("arcExpr"), ins_expr});
      g.insert({ins_expr, rdf_type(), spn_term("SPARQLRule")});
      g.insert({ins_expr, spn_term("hasSPARQL"),
                Term::literal("SELECT ?v { ?v " + sparql_iri(rdf_type()) + " " + sparql_iri(*mp.value_class) + " }")});
    }
  }
  if (!changed) return m;
  return model::load_model(std::move(g));
}

std::set<Term> places_read(const model::SpnModel& m, const model::Rule& r, const Term& self) {
  const Term contains = contains_pred();
  const auto members = member_places(m);
  std::set<Term> all;
  for (const auto& [p, d] : m.places) all.insert(p);
  auto all_members = [&](const Term& relation) {
    std::set<Term> out;
    for (const auto& [s, p] : members.at(relation)) out.insert(p);
    return out;
  };
  auto is_marking_pred = [&](const Term& p) { return p == contains || members.count(p); };

  std::set<Term> out;
  for (const auto* leaf : model::sparql_leaves(r)) {
    const auto& pattern = leaf->query.pattern;
    sparql::GraphPattern frozen;
    std::set<std::string> frozen_vars;
    bool reads_everything = false;
    for (const auto& tp : pattern.triples) {
      if (std::holds_alternative<sparql::Variable>(tp.predicate)) {
        reads_everything = true;
      } else if (auto* path = std::get_if<sparql::Path>(&tp.predicate)) {
        bool marking = false;
        for (const auto& step : path->steps) {
          if (step == contains) {
            out.insert(all.begin(), all.end());
            marking = true;
          } else if (members.count(step)) {
            auto s = all_members(step);
            out.insert(s.begin(), s.end());
            marking = true;
          }
        }
        if (!marking) {
          frozen.triples.push_back(tp);
          auto v = pattern_vars(tp);
          frozen_vars.insert(v.begin(), v.end());
        }
      } else if (!is_marking_pred(std::get<Term>(tp.predicate))) {
        frozen.triples.push_back(tp);
        auto v = pattern_vars(tp);
        frozen_vars.insert(v.begin(), v.end());
      }
    }
    if (reads_everything) return all;
    for (const auto& f : pattern.filters) {
      std::set<std::string> vars;
      filter_vars(f, vars);
      bool ok = std::all_of(vars.begin(), vars.end(),
                            [&](const std::string& v) { return frozen_vars.count(v) || v == "SELF"; });
      if (ok) frozen.filters.push_back(f);
    }

    // Candidate values of a subject position, or nothing if unconstrained.
    auto narrow = [&](const sparql::PatternTerm& pt) -> std::optional<std::set<Term>> {
      if (auto* t = std::get_if<Term>(&pt)) return std::set<Term>{*t};
      const auto& name = std::get<sparql::Variable>(pt).name;
      if (name == "SELF") return std::set<Term>{self};
      if (!frozen_vars.count(name)) return std::nullopt;
      Query q;
      q.form = sparql::QueryForm::Select;
      q.distinct = true;
      q.projected = {name};
      q.pattern = frozen;
      std::set<Term> vals;
      for (const auto& row : sparql::evaluate(q, m.graph, {{"SELF", self}}).rows) {
        if (auto it = row.find(name); it != row.end()) vals.insert(it->second);
      }
      return vals;
    };

    for (const auto& tp : pattern.triples) {
      auto* pred = std::get_if<Term>(&tp.predicate);
      if (!pred) continue;
      if (*pred == contains) {
        auto vals = narrow(tp.subject);
        if (!vals) {
          out.insert(all.begin(), all.end());
          continue;
        }
        for (const auto& v : *vals) {
          if (m.places.count(v)) out.insert(v);
        }
      } else if (auto rel = members.find(*pred); rel != members.end()) {
        auto vals = narrow(tp.subject);
        if (!vals) {
          auto s = all_members(*pred);
          out.insert(s.begin(), s.end());
          continue;
        }
        for (const auto& v : *vals) {
          if (auto it = rel->second.find(v); it != rel->second.end()) out.insert(it->second);
        }
      }
    }
  }
  return out;
}

std::set<Term> places_read_by(const model::SpnModel& m, const Term& transition) {
  std::set<Term> out;
  const auto& t = m.transitions.at(transition);
  auto add = [&](const model::Rule& r, const Term& self) {
    auto s = places_read(m, r, self);
    out.insert(s.begin(), s.end());
  };
  if (t.guard) add(*t.guard, transition);
  for (const auto* a : m.arcs_of(transition)) {
    if (a->expr && !is_read_arc(*a)) add(*a->expr, a->iri);
    if (a->direction == model::Direction::T2P) {
      const auto& p = m.places.at(a->place);
      if (p.color_rule) add(*p.color_rule, p.iri);
    }
  }
  return out;
}

model::SpnModel explicate_connections(const model::SpnModel& m) {
  rdf::Graph g = m.graph;
  std::size_t n = 0;
  for (const auto& [tiri, t] : m.transitions) {
    std::set<Term> adjacent;
    for (const auto* a : m.arcs_of(tiri)) adjacent.insert(a->place);
    std::vector<Term> remote;
    for (const auto& p : places_read_by(m, tiri)) {
      if (!adjacent.count(p)) remote.push_back(p);
    }
    if (remote.empty()) continue;
    if (t.args.empty()) {
      throw NonInternalizableError("transition " + tiri.to_ntriples() + " reads remote places but has no argument");
    }
    std::string var = "fetched";
    for (int k = 1; t.arg("?" + var); ++k) var = "fetched" + std::to_string(k);
    for (const auto& place : remote) {
      const std::string base = "read_" + std::to_string(n++);
      const Term expr = spnx_term(base + "_expr");
      g.insert({expr, rdf_type(), spn_term("SPARQLRule")});
      g.insert({expr, spn_term("hasSPARQL"),
                Term::literal("SELECT ?" + var + " { " + sparql_iri(place) + " " + sparql_iri(contains_pred()) +
                              " ?" + var + " }")});
      for (const char* dir : {"fetch", "return"}) {
        const Term arc = spnx_term(base + "_" + dir);
        g.insert({arc, rdf_type(), spn_term(std::string(dir) == "fetch" ? "ArcP2T" : "ArcT2P")});
        g.insert({arc, spn_term("relPlace"), place});
        g.insert({arc, spn_term("relTransition"), tiri});
        g.insert({arc, spn_term("hasArg"), Term::literal(t.args.front().name)});
        g.insert({arc, spn_term("arcExpr"), expr});
        g.insert({arc, runtime::engine_terms::read_arc(), Term::boolean(true)});
      }
    }
  }
  if (n == 0) return m;
  return model::load_model(std::move(g));
}

std::size_t CpnNet::place_index(const Term& origin, bool complement) const {
  for (std::size_t i = 0; i < places.size(); ++i) {
    if (places[i].origin == origin && places[i].complement == complement) return i;
  }
  throw Error("no CPN place for " + origin.to_ntriples());
}

namespace {

bool sharing_place(const model::PlaceDef& p) {
  auto v = model::annotation(p.annotations, runtime::engine_terms::shares_tokens().value());
  return v && v->as_boolean().value_or(false);
}

// One tabulation pass over the current colorsets. New (place, token) pairs
// the engine produces are collected into `grown`.
std::vector<CpnTransition> tabulate_pass(const SpnModel& m, runtime::Engine& e,
                                         const std::map<Term, std::set<Term>>& cs,
                                         const std::map<Term, std::size_t>& index,
                                         const TabulateOptions& options,
                                         std::map<Term, std::set<Term>>& grown) {
  std::vector<CpnTransition> out;
  std::set<Term> non_sharing;
  for (const auto& [p, d] : m.places) {
    if (!sharing_place(d)) non_sharing.insert(p);
  }
  for (const auto& [tiri, t] : m.transitions) {
    CpnTransition ct;
    ct.origin = tiri;
    std::set<Term> observed = places_read_by(m, tiri);
    bool feeds_exclusive = false;
    for (const auto* a : m.arcs_of(tiri)) {
      observed.insert(a->place);
      if (is_read_arc(*a) && a->direction == model::Direction::P2T) ct.read_places.push_back(index.at(a->place));
      if (a->direction == model::Direction::T2P && non_sharing.count(a->place)) feeds_exclusive = true;
    }
    if (feeds_exclusive) observed.insert(non_sharing.begin(), non_sharing.end());
    for (const auto& p : observed) ct.observed.push_back(index.at(p));

    // Snapshot choices: each token sits in at most one observed
    // non-sharing place; sharing places take any subset.
    std::set<Term> tokens;
    std::vector<Term> shared;
    for (const auto& p : observed) {
      if (non_sharing.count(p)) {
        tokens.insert(cs.at(p).begin(), cs.at(p).end());
      } else {
        shared.push_back(p);
      }
    }
    std::vector<std::pair<Term, std::vector<Term>>> choices;  // token -> candidate places
    double total = 1;
    for (const auto& tok : tokens) {
      std::vector<Term> where;
      for (const auto& p : observed) {
        if (non_sharing.count(p) && cs.at(p).count(tok)) where.push_back(p);
      }
      total *= static_cast<double>(where.size() + 1);
      choices.push_back({tok, where});
    }
    for (const auto& p : shared) total *= std::pow(2.0, static_cast<double>(cs.at(p).size()));
    if (total > static_cast<double>(options.max_snapshots)) {
      throw UnfoldLimitExceeded("transition " + tiri.to_ntriples() + " needs " + std::to_string(total) +
                                " snapshots");
    }

    runtime::Marking snap;
    for (const auto& [p, d] : m.places) snap[p];
    auto emit = [&]() {
      e.set_marking(snap);
      for (const auto& b : e.enumerate_bindings(tiri)) {
        auto rec = e.preview(b);
        if (!rec) continue;
        std::set<CpnToken> pre;
        for (const auto& p : observed) {
          for (const auto& c : cs.at(p)) {
            pre.insert({index.at(p) + (snap.at(p).count(c) ? 0 : 1), c});
          }
        }
        std::set<CpnToken> post = pre;
        bool outside = false;
        for (const auto& [p, c] : rec->consumed) {
          post.erase({index.at(p), c});
          post.insert({index.at(p) + 1, c});
        }
        for (const auto& [p, c] : rec->produced) {
          if (!cs.at(p).count(c)) {
            grown[p].insert(c);
            outside = true;
            continue;
          }
          post.erase({index.at(p) + 1, c});
          post.insert({index.at(p), c});
        }
        if (outside) continue;
        ct.rows.push_back({b.assignment, {pre.begin(), pre.end()}, {post.begin(), post.end()}});
      }
    };
    std::function<void(std::size_t)> shared_rec = [&](std::size_t i) {
      if (i == shared.size()) {
        emit();
        return;
      }
      std::vector<Term> colors(cs.at(shared[i]).begin(), cs.at(shared[i]).end());
      for (std::size_t mask = 0; mask < (std::size_t{1} << colors.size()); ++mask) {
        auto& slot = snap[shared[i]];
        slot.clear();
        for (std::size_t k = 0; k < colors.size(); ++k) {
          if (mask >> k & 1) slot.insert(colors[k]);
        }
        shared_rec(i + 1);
      }
      snap[shared[i]].clear();
    };
    std::function<void(std::size_t)> token_rec = [&](std::size_t i) {
      if (i == choices.size()) {
        shared_rec(0);
        return;
      }
      const auto& [tok, where] = choices[i];
      token_rec(i + 1);
      for (const auto& p : where) {
        snap[p].insert(tok);
        token_rec(i + 1);
        snap[p].erase(tok);
      }
    };
    token_rec(0);
    out.push_back(std::move(ct));
  }
  return out;
}

}  // namespace

CpnNet tabulate_rules(const model::SpnModel& m, const TabulateOptions& options) {
  runtime::EngineConfig cfg;
  cfg.ignore_timing = true;
  runtime::Engine e(m, cfg);
  e.keep_events(false);
  e.init_marking();
  const runtime::Marking initial = e.marking();

  std::map<Term, std::set<Term>> cs = initial;
  std::map<Term, std::size_t> index;
  for (const auto& [p, d] : m.places) {
    const std::size_t i = 2 * index.size();
    index[p] = i;
  }

  while (true) {
    std::set<Term> universe;
    for (const auto& [p, toks] : cs) universe.insert(toks.begin(), toks.end());
    if (universe.size() > options.vocab_bound) {
      throw VocabBoundExceeded("token universe has " + std::to_string(universe.size()) + " terms, bound is " +
                               std::to_string(options.vocab_bound));
    }
    std::map<Term, std::set<Term>> grown;
    auto transitions = tabulate_pass(m, e, cs, index, options, grown);
    if (!grown.empty()) {
      for (const auto& [p, toks] : grown) cs[p].insert(toks.begin(), toks.end());
      continue;
    }
    CpnNet net;
    net.universe = universe;
    for (const auto& [p, d] : m.places) {
      std::vector<Term> colors(cs.at(p).begin(), cs.at(p).end());
      net.places.push_back({p.value(), p, false, colors});
      net.places.push_back({p.value() + "#complement", p, true, colors});
      for (const auto& c : colors) net.initial.insert({index.at(p) + (initial.at(p).count(c) ? 0 : 1), c});
    }
    net.transitions = std::move(transitions);
    return net;
  }
}

std::string fingerprint(const CpnNet& net, const CpnMarking& marking) {
  std::vector<std::string> lines;
  lines.reserve(marking.size());
  for (const auto& [p, tok] : marking) lines.push_back(net.places[p].name + " " + tok.to_ntriples());
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> enabled_rows(const CpnNet& net, const CpnMarking& marking) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    const auto& rows = net.transitions[t].rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bool ok = std::all_of(rows[r].pre.begin(), rows[r].pre.end(),
                            [&](const CpnToken& x) { return marking.count(x) != 0; });
      if (ok) out.push_back({t, r});
    }
  }
  return out;
}

CpnMarking fire_row(const CpnNet& net, const CpnMarking& marking, std::size_t transition, std::size_t row) {
  const auto& r = net.transitions.at(transition).rows.at(row);
  CpnMarking next = marking;
  for (const auto& x : r.pre) {
    if (!next.erase(x)) throw Error("row is not enabled");
  }
  for (const auto& x : r.post) {
    if (!next.insert(x).second) throw Error("row would make a place unsafe");
  }
  return next;
}

Reachability explore(const CpnNet& net, std::size_t bound) {
  Reachability out;
  std::unordered_map<std::string, std::size_t> seen;
  out.markings.push_back(net.initial);
  seen[fingerprint(net, net.initial)] = 0;
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop_front();
    for (const auto& [t, r] : enabled_rows(net, out.markings[cur])) {
      CpnMarking next = fire_row(net, out.markings[cur], t, r);
      std::string fp = fingerprint(net, next);
      auto it = seen.find(fp);
      if (it == seen.end()) {
        if (out.markings.size() >= bound) {
          out.truncated = true;
          continue;
        }
        it = seen.emplace(std::move(fp), out.markings.size()).first;
        out.markings.push_back(std::move(next));
        frontier.push_back(it->second);
      }
      out.edges.push_back({cur, t, r, it->second});
    }
  }
  return out;
}

runtime::Marking project(const CpnNet& net, const CpnMarking& marking) {
  runtime::Marking out;
  for (const auto& p : net.places) {
    if (!p.complement) out[p.origin];
  }
  for (const auto& [p, tok] : marking) {
    if (!net.places[p].complement) out[net.places[p].origin].insert(tok);
  }
  return out;
}

CpnMarking embed(const CpnNet& net, const runtime::Marking& marking) {
  CpnMarking out;
  for (std::size_t i = 0; i < net.places.size(); ++i) {
    const auto& p = net.places[i];
    auto it = marking.find(p.origin);
    for (const auto& c : p.colorset) {
      bool held = it != marking.end() && it->second.count(c);
      if (held != p.complement) out.insert({i, c});
    }
    if (!p.complement && it != marking.end()) {
      for (const auto& c : it->second) {
        if (!std::binary_search(p.colorset.begin(), p.colorset.end(), c)) {
          throw Error("token " + c.to_ntriples() + " outside the colorset of " + p.name);
        }
      }
    }
  }
  return out;
}

namespace {

nlohmann::json tokens_json(const CpnNet& net, const std::vector<CpnToken>& toks) {
  auto out = nlohmann::json::array();
  for (const auto& [p, tok] : toks) out.push_back({net.places[p].name, tok.to_ntriples()});
  return out;
}

}  // namespace

std::string net_json(const CpnNet& net) {
  nlohmann::json j;
  j["places"] = nlohmann::json::array();
  for (const auto& p : net.places) {
    auto colors = nlohmann::json::array();
    for (const auto& c : p.colorset) colors.push_back(c.to_ntriples());
    j["places"].push_back({{"name", p.name}, {"origin", p.origin.value()}, {"complement", p.complement},
                           {"colorset", colors}});
  }
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : net.transitions) {
    nlohmann::json jt;
    jt["name"] = t.origin.value();
    jt["read_places"] = nlohmann::json::array();
    for (auto p : t.read_places) jt["read_places"].push_back(net.places[p].name);
    jt["rows"] = nlohmann::json::array();
    for (const auto& r : t.rows) {
      nlohmann::json b = nlohmann::json::object();
      for (const auto& [k, v] : r.binding) b[k] = v.to_ntriples();
      jt["rows"].push_back({{"binding", b}, {"pre", tokens_json(net, r.pre)}, {"post", tokens_json(net, r.post)}});
    }
    j["transitions"].push_back(jt);
  }
  j["initial"] = tokens_json(net, {net.initial.begin(), net.initial.end()});
  return j.dump(2);
}

std::string reachability_json(const CpnNet& net, const Reachability& r) {
  nlohmann::json j;
  j["truncated"] = r.truncated;
  j["markings"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.markings.size(); ++i) {
    std::vector<CpnToken> held;
    for (const auto& x : r.markings[i]) {
      if (!net.places[x.first].complement) held.push_back(x);
    }
    j["markings"].push_back({{"id", i}, {"tokens", tokens_json(net, held)}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : r.edges) {
    j["edges"].push_back({{"from", e.from}, {"transition", net.transitions[e.transition].origin.value()},
                          {"row", e.row}, {"to", e.to}});
  }
  return j.dump(2);
}

CpnNet unfold(const model::SpnModel& m, const MutableDeclaration& decl, const TabulateOptions& options) {
  return tabulate_rules(explicate_connections(internalize_domain(m, decl)), options);
}

}  // namespace spn::unfold
