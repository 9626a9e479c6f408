#include "spn/runtime/engine.hpp"

#include <algorithm>
#include <deque>

#include "json.hpp"
#include "spn/error.hpp"
#include "spn/rdf/vocab.hpp"

namespace spn::runtime {

using model::ArcDef;
using model::Direction;
using model::TransitionDef;

namespace engine_terms {
Term clock() { return Term::iri(ns::spnx_("clock")); }
Term current_tick() { return Term::iri(ns::spnx_("currentTick")); }
Term last_move_tick() { return Term::iri(ns::spnx_("lastMoveTick")); }
Term fires_in_tick() { return Term::iri(ns::spnx_("firesInTick")); }
Term max_tokens() { return Term::iri(ns::spnx_("maxTokens")); }
Term max_fires_per_tick() { return Term::iri(ns::spnx_("maxFiresPerTick")); }
Term min_ticks_between_moves() { return Term::iri(ns::spnx_("minTicksBetweenMoves")); }
Term shares_tokens() { return Term::iri(ns::spnx_("sharesTokens")); }
Term read_arc() { return Term::iri(ns::spnx_("readArc")); }
}  // namespace engine_terms

namespace {

const Term& contains_pred() {
  static const Term t = Term::iri(ns::ldp_("contains"));
  return t;
}

std::optional<std::size_t> count_annotation(const model::Annotations& a, const Term& predicate) {
  auto it = a.find(predicate);
  if (it == a.end() || it->second.empty()) return std::nullopt;
  auto n = it->second.front().as_number();
  if (!n || *n < 0) return std::nullopt;
  return static_cast<std::size_t>(*n);
}

bool flag_annotation(const model::Annotations& a, const Term& predicate) {
  auto it = a.find(predicate);
  if (it == a.end() || it->second.empty()) return false;
  return it->second.front().as_boolean().value_or(false);
}

bool is_read_arc(const ArcDef& a) { return flag_annotation(a.annotations, engine_terms::read_arc()); }

}  // namespace

Engine::Engine(model::SpnModel model, EngineConfig config)
    : model_(std::move(model)), config_(std::move(config)), rng_(config_.seed) {
  eval_options_.short_circuit = config_.short_circuit;
  eval_options_.leaf_counter = &leaf_counter_;
  for (const auto& [iri, t] : model_.transitions) transition_order_.push_back(iri);

  const Term clock_pred = engine_terms::current_tick();
  auto reads = [&](const std::optional<model::Rule>& r) { return r && model::reads_predicate(*r, clock_pred); };
  for (const auto& [iri, p] : model_.places) reads_clock_ |= reads(p.color_rule) || reads(p.init_rule);
  for (const auto& [iri, t] : model_.transitions) reads_clock_ |= reads(t.guard);
  for (const auto& [iri, a] : model_.arcs) reads_clock_ |= reads(a.expr);

  for (const auto& [iri, p] : model_.places) {
    auto resource = model::annotation(p.annotations, ns::ldp_("membershipResource"));
    auto relation = model::annotation(p.annotations, ns::ldp_("hasMemberRelation"));
    if (resource && relation) members_[iri] = {*resource, *relation};
  }
  for (const auto& t : model_.graph.match(std::nullopt, engine_terms::last_move_tick(), std::nullopt)) {
    if (auto n = t.object.as_number()) last_move_[t.subject] = static_cast<long long>(*n);
  }
  if (auto now = model_.graph.object(engine_terms::clock(), engine_terms::current_tick())) {
    if (auto n = now->as_number()) tick_ = static_cast<long long>(*n);
  }
}

bool Engine::contains(const Term& place, const Term& token) const {
  return model_.graph.contains({place, contains_pred(), token});
}

void Engine::add_token(const Term& place, const Term& token) {
  model_.graph.insert({place, contains_pred(), token});
  if (auto it = members_.find(place); it != members_.end()) {
    model_.graph.insert({it->second.first, it->second.second, token});
  }
}

void Engine::drop_token(const Term& place, const Term& token) {
  model_.graph.remove({place, contains_pred(), token});
  if (auto it = members_.find(place); it != members_.end()) {
    model_.graph.remove({it->second.first, it->second.second, token});
  }
}

bool Engine::sharing(const Term& place) const {
  return flag_annotation(model_.places.at(place).annotations, engine_terms::shares_tokens());
}

std::optional<std::size_t> Engine::capacity(const Term& place) const {
  if (auto it = config_.max_tokens.find(place); it != config_.max_tokens.end()) return it->second;
  return count_annotation(model_.places.at(place).annotations, engine_terms::max_tokens());
}

std::optional<std::size_t> Engine::quota(const Term& transition) const {
  if (auto it = config_.max_fires_per_tick.find(transition); it != config_.max_fires_per_tick.end()) {
    return it->second;
  }
  return count_annotation(model_.transitions.at(transition).annotations, engine_terms::max_fires_per_tick());
}

std::size_t Engine::spacing(const Term& transition) const {
  auto own = count_annotation(model_.transitions.at(transition).annotations,
                              engine_terms::min_ticks_between_moves());
  return own ? *own : config_.min_ticks_between_moves.value_or(0);
}

bool Engine::color_ok(const Term& place, const Term& token) {
  const auto& p = model_.places.at(place);
  if (!p.color_rule) return true;
  return model::eval_boolean(*p.color_rule, model_.graph, {{"TOKEN", token}}, place, eval_options_);
}

void Engine::check_exclusive(const Term& place, const Term& token) const {
  if (sharing(place)) return;
  for (const auto& other : model_.graph.subjects(contains_pred(), token)) {
    if (other == place || !model_.places.count(other) || sharing(other)) continue;
    throw DuplicateTokenError("token " + token.to_ntriples() + " would sit in both " + other.to_ntriples() +
                              " and " + place.to_ntriples());
  }
}

void Engine::set_clock(long long tick) {
  for (const auto& t : model_.graph.match(engine_terms::clock(), engine_terms::current_tick(), std::nullopt)) {
    model_.graph.remove(t);
  }
  model_.graph.insert({engine_terms::clock(), engine_terms::current_tick(), Term::integer(tick)});
}

void Engine::init_marking() {
  set_clock(tick_);
  for (const auto& [iri, p] : model_.places) {
    if (p.init_rule) {
      for (const auto& token : model::eval_terms(*p.init_rule, model_.graph, {}, iri, eval_options_)) {
        add_token(iri, token);
      }
    }
  }
  for (const auto& [place, m] : members_) {
    for (const auto& token : model_.graph.objects(m.first, m.second)) add_token(place, token);
    for (const auto& token : model_.graph.objects(place, contains_pred())) add_token(place, token);
  }
  for (const auto& [place, tokens] : marking()) {
    for (const auto& token : tokens) {
      if (config_.strict_colors && !color_ok(place, token)) {
        throw ColorViolation(place.to_ntriples(), token.to_ntriples());
      }
      check_exclusive(place, token);
    }
  }
  initialized_ = true;
}

Marking Engine::marking() const {
  Marking m;
  for (const auto& [iri, p] : model_.places) {
    auto tokens = model_.graph.objects(iri, contains_pred());
    m[iri] = std::set<Term>(tokens.begin(), tokens.end());
  }
  return m;
}

void Engine::set_marking(const Marking& target) {
  for (const auto& [place, current] : marking()) {
    auto it = target.find(place);
    static const std::set<Term> empty;
    const auto& want = it == target.end() ? empty : it->second;
    for (const auto& token : current) {
      if (!want.count(token)) drop_token(place, token);
    }
    for (const auto& token : want) {
      if (!current.count(token)) add_token(place, token);
    }
  }
}

std::vector<TransitionBinding> Engine::enumerate_bindings(const Term& transition) const {
  const TransitionDef& t = model_.transitions.at(transition);
  const auto arcs = model_.arcs_of(transition);
  const Term type = Term::iri(ns::rdf_("type"));

  std::vector<std::vector<Term>> candidates;
  for (const auto& arg : t.args) {
    std::vector<const ArcDef*> direct, with_expr, generators;
    for (const ArcDef* a : arcs) {
      if (!a->has_arg(arg.name) || is_read_arc(*a)) continue;
      if (a->direction == Direction::P2T) {
        (a->expr ? with_expr : direct).push_back(a);
      } else if (a->expr) {
        generators.push_back(a);
      }
    }
    std::set<Term> pool;
    if (!direct.empty()) {
      auto first = model_.graph.objects(direct.front()->place, contains_pred());
      pool.insert(first.begin(), first.end());
      for (std::size_t i = 1; i < direct.size(); ++i) {
        std::set<Term> keep;
        for (const auto& tok : pool) {
          if (contains(direct[i]->place, tok)) keep.insert(tok);
        }
        pool = std::move(keep);
      }
    } else if (!with_expr.empty()) {
      for (const ArcDef* a : with_expr) {
        for (const auto& tok : model_.graph.objects(a->place, contains_pred())) pool.insert(tok);
      }
    } else if (!generators.empty()) {
      model::EvalOptions opts;
      for (const ArcDef* a : generators) {
        for (const auto& tok : model::eval_terms(*a->expr, model_.graph, {}, a->iri, opts)) pool.insert(tok);
      }
    } else {
      throw UnboundArgError("arg " + arg.name + " of " + transition.to_ntriples() + " has no candidate source");
    }
    std::vector<Term> list;
    for (const auto& tok : pool) {
      if (!arg.allowed_types.empty()) {
        bool typed = std::any_of(arg.allowed_types.begin(), arg.allowed_types.end(),
                                 [&](const Term& c) { return model_.graph.contains({tok, type, c}); });
        if (!typed) continue;
      }
      list.push_back(tok);
    }
    if (list.empty()) return {};
    candidates.push_back(std::move(list));
  }

  std::vector<TransitionBinding> out;
  std::vector<std::size_t> index(candidates.size(), 0);
  while (true) {
    TransitionBinding b{transition, {}};
    for (std::size_t i = 0; i < candidates.size(); ++i) b.assignment[t.args[i].var()] = candidates[i][index[i]];
    out.push_back(std::move(b));
    std::size_t i = candidates.size();
    while (i > 0) {
      --i;
      if (++index[i] < candidates[i].size()) break;
      index[i] = 0;
      if (i == 0) return out;
    }
    if (candidates.empty()) return out;
  }
}

bool Engine::build_plan(const TransitionBinding& b, Plan& plan, bool throw_errors) {
  auto tokens_of = [&](const ArcDef& a) -> std::vector<Term> {
    if (a.expr) return model::eval_terms(*a.expr, model_.graph, b.assignment, a.iri, eval_options_);
    return {b.assignment.at(a.args.front().var())};
  };
  for (const ArcDef* a : model_.inputs(b.transition)) {
    for (const auto& tok : tokens_of(*a)) {
      if (!contains(a->place, tok)) {
        if (throw_errors) {
          throw StaleBindingError("token " + tok.to_ntriples() + " is no longer in " + a->place.to_ntriples());
        }
        return false;
      }
      plan.consumed.emplace_back(a->place, tok);
    }
  }
  for (const ArcDef* a : model_.outputs(b.transition)) {
    for (const auto& tok : tokens_of(*a)) plan.produced.emplace_back(a->place, tok);
  }
  std::sort(plan.consumed.begin(), plan.consumed.end());
  plan.consumed.erase(std::unique(plan.consumed.begin(), plan.consumed.end()), plan.consumed.end());
  return true;
}

Engine::Check Engine::check(const TransitionBinding& b, Plan* plan) {
  const TransitionDef& t = model_.transitions.at(b.transition);
  const std::size_t gap = config_.ignore_timing ? 0 : spacing(b.transition);
  if (!config_.ignore_timing) {
    if (auto q = quota(b.transition); q && fired_this_tick_[b.transition] >= *q) return Check::TimeBlocked;
  }
  auto outputs = model_.outputs(b.transition);
  for (const ArcDef* a : model_.inputs(b.transition)) {
    if (a->expr) continue;
    const Term& tok = b.assignment.at(a->args.front().var());
    if (!contains(a->place, tok)) return Check::Disabled;
    bool returns = std::any_of(outputs.begin(), outputs.end(), [&](const ArcDef* o) { return o->place == a->place; });
    if (gap && !returns) {
      auto it = last_move_.find(tok);
      if (it != last_move_.end() && tick_ - it->second < static_cast<long long>(gap)) return Check::TimeBlocked;
    }
  }

  ++stats_.rule_checks;
  if (t.guard && !model::eval_boolean(*t.guard, model_.graph, b.assignment, t.iri, eval_options_)) {
    return Check::Disabled;
  }

  Plan local;
  Plan& p = plan ? *plan : local;
  if (!build_plan(b, p, false)) return Check::Disabled;

  std::set<std::pair<Term, Term>> consumed(p.consumed.begin(), p.consumed.end());
  std::set<std::pair<Term, Term>> produced(p.produced.begin(), p.produced.end());
  if (gap) {
    for (const auto& c : consumed) {
      if (produced.count(c)) continue;
      auto it = last_move_.find(c.second);
      if (it != last_move_.end() && tick_ - it->second < static_cast<long long>(gap)) return Check::TimeBlocked;
    }
  }

  std::map<Term, long long> delta;
  for (const auto& c : consumed) {
    if (!produced.count(c)) --delta[c.first];
  }
  for (const auto& pr : produced) {
    if (!consumed.count(pr) && !contains(pr.first, pr.second)) ++delta[pr.first];
  }
  for (const auto& [place, d] : delta) {
    if (d <= 0) continue;
    auto cap = capacity(place);
    if (!cap) continue;
    std::size_t now = model_.graph.objects(place, contains_pred()).size();
    if (static_cast<long long>(now) + d > static_cast<long long>(*cap)) return Check::Disabled;
  }

  if (!config_.strict_colors) {
    for (const auto& pr : produced) {
      if (!consumed.count(pr) && !color_ok(pr.first, pr.second)) return Check::Disabled;
    }
  }
  return Check::Enabled;
}

std::vector<std::pair<Term, Term>> Engine::validate(const Plan& plan) {
  std::set<std::pair<Term, Term>> consumed(plan.consumed.begin(), plan.consumed.end());
  std::vector<std::pair<Term, Term>> produced;
  std::set<std::pair<Term, Term>> seen;
  for (const auto& pr : plan.produced) {
    bool present = (contains(pr.first, pr.second) && !consumed.count(pr)) || seen.count(pr);
    if (present) {
      if (config_.duplicate_noop) continue;
      throw DuplicateTokenError("token " + pr.second.to_ntriples() + " already in " + pr.first.to_ntriples());
    }
    seen.insert(pr);
    produced.push_back(pr);
  }
  if (config_.strict_colors) {
    for (const auto& pr : produced) {
      if (!consumed.count(pr) && !color_ok(pr.first, pr.second)) {
        throw ColorViolation(pr.first.to_ntriples(), pr.second.to_ntriples());
      }
    }
  }
  std::set<std::pair<Term, Term>> produced_set(produced.begin(), produced.end());
  for (const auto& tok : [&] {
         std::set<Term> out;
         for (const auto& pr : produced) out.insert(pr.second);
         return out;
       }()) {
    std::set<Term> holders;
    for (const auto& place : model_.graph.subjects(contains_pred(), tok)) {
      if (!model_.places.count(place) || sharing(place)) continue;
      if (consumed.count({place, tok}) && !produced_set.count({place, tok})) continue;
      holders.insert(place);
    }
    for (const auto& pr : produced) {
      if (pr.second == tok && !sharing(pr.first)) holders.insert(pr.first);
    }
    if (holders.size() > 1) {
      throw DuplicateTokenError("token " + tok.to_ntriples() + " would sit in both " +
                                holders.begin()->to_ntriples() + " and " + holders.rbegin()->to_ntriples());
    }
  }

  return produced;
}

FiringRecord Engine::apply(const TransitionBinding& b, const Plan& plan) {
  const auto produced = validate(plan);
  std::set<std::pair<Term, Term>> consumed(plan.consumed.begin(), plan.consumed.end());
  std::set<std::pair<Term, Term>> produced_set(produced.begin(), produced.end());
  for (const auto& c : plan.consumed) drop_token(c.first, c.second);
  for (const auto& pr : produced) add_token(pr.first, pr.second);

  std::set<Term> moved;
  for (const auto& c : consumed) {
    if (!produced_set.count(c)) moved.insert(c.second);
  }
  for (const auto& pr : produced) {
    if (!consumed.count(pr)) moved.insert(pr.second);
  }
  for (const auto& tok : moved) {
    last_move_[tok] = tick_;
    for (const auto& t : model_.graph.match(tok, engine_terms::last_move_tick(), std::nullopt)) {
      model_.graph.remove(t);
    }
    model_.graph.insert({tok, engine_terms::last_move_tick(), Term::integer(tick_)});
  }

  std::size_t n = ++fired_this_tick_[b.transition];
  for (const auto& t : model_.graph.match(b.transition, engine_terms::fires_in_tick(), std::nullopt)) {
    model_.graph.remove(t);
  }
  model_.graph.insert({b.transition, engine_terms::fires_in_tick(), Term::integer(static_cast<long long>(n))});
  ++stats_.firings;
  ++stats_.per_transition[b.transition];

  FiringRecord r{tick_, b.transition, b.assignment, plan.consumed, produced};
  if (keep_events_) events_.push_back(r);
  return r;
}

std::optional<FiringRecord> Engine::preview(const TransitionBinding& b) {
  Plan plan;
  if (check(b, &plan) != Check::Enabled) return std::nullopt;
  try {
    return FiringRecord{tick_, b.transition, b.assignment, plan.consumed, validate(plan)};
  } catch (const DuplicateTokenError&) {
    return std::nullopt;
  } catch (const ColorViolation&) {
    return std::nullopt;
  }
}

bool Engine::is_enabled(const TransitionBinding& b) { return check(b, nullptr) == Check::Enabled; }

FiringRecord Engine::fire(const TransitionBinding& b) {
  Plan plan;
  Check c = check(b, &plan);
  if (c != Check::Enabled) {
    Plan probe;
    build_plan(b, probe, true);
    throw StaleBindingError("binding of " + b.transition.to_ntriples() + " is not enabled");
  }
  return apply(b, plan);
}

TickReport Engine::step_tick() {
  if (!initialized_) init_marking();
  TickReport report;
  report.tick = tick_;
  const std::size_t checks_before = stats_.rule_checks;
  time_blocked_ = false;

  while (true) {
    std::size_t fired = 0;
    std::vector<Term> order = transition_order_;
    if (config_.shuffle) std::shuffle(order.begin(), order.end(), rng_);
    for (const auto& t : order) {
      for (const auto& b : enumerate_bindings(t)) {
        Plan plan;
        Check c = check(b, &plan);
        if (c == Check::TimeBlocked) time_blocked_ = true;
        if (c != Check::Enabled) continue;
        apply(b, plan);
        ++fired;
        if (++report.firings > config_.max_firings_per_tick) {
          throw TickLimitExceeded("more than " + std::to_string(config_.max_firings_per_tick) +
                                  " firings in tick " + std::to_string(tick_));
        }
      }
    }
    if (fired == 0) break;
  }

  report.rule_checks = stats_.rule_checks - checks_before;
  report.quiescent = report.firings == 0 && !time_blocked_ && (!reads_clock_ || report.rule_checks == 0);
  ++tick_;
  ++stats_.ticks_elapsed;
  fired_this_tick_.clear();
  for (const auto& t : model_.graph.match(std::nullopt, engine_terms::fires_in_tick(), std::nullopt)) {
    model_.graph.remove(t);
  }
  set_clock(tick_);
  return report;
}

RunStats Engine::run() {
  const auto start = std::chrono::steady_clock::now();
  if (!initialized_) init_marking();
  while (stats_.ticks_elapsed < config_.max_ticks) {
    if (step_tick().quiescent) break;
  }
  for (const auto& [iri, t] : model_.transitions) stats_.per_transition[iri] += 0;
  stats_.per_place.clear();
  for (const auto& [place, tokens] : marking()) stats_.per_place[place] = tokens.size();
  stats_.leaf_checks = leaf_counter_;
  stats_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats_;
}

sparql::QueryResult Engine::query_state(const std::string& text) const {
  return sparql::evaluate(sparql::parse_sparql(text, model_.graph.prefixes()), model_.graph);
}

std::string to_json_line(const FiringRecord& r) {
  nlohmann::json j;
  j["tick"] = r.tick;
  j["transition"] = r.transition.to_ntriples();
  nlohmann::json binding = nlohmann::json::object();
  for (const auto& [name, term] : r.binding) binding[name] = term.to_ntriples();
  j["binding"] = binding;
  auto pairs = [](const std::vector<std::pair<Term, Term>>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [p, t] : v) out.push_back({p.to_ntriples(), t.to_ntriples()});
    return out;
  };
  j["consumed"] = pairs(r.consumed);
  j["produced"] = pairs(r.produced);
  return j.dump();
}

std::string event_log(const std::vector<FiringRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json_line(r) + "\n";
  return out;
}

std::string stats_json(const RunStats& s) {
  nlohmann::json j;
  j["ticks_elapsed"] = s.ticks_elapsed;
  j["rule_checks"] = s.rule_checks;
  j["leaf_checks"] = s.leaf_checks;
  j["firings"] = s.firings;
  nlohmann::json pt = nlohmann::json::object();
  for (const auto& [t, n] : s.per_transition) pt[t.value()] = n;
  nlohmann::json pp = nlohmann::json::object();
  for (const auto& [p, n] : s.per_place) pp[p.value()] = n;
  j["per_transition"] = pt;
  j["per_place"] = pp;
  return j.dump(2) + "\n";
}

ReachableMarkings explore_markings(const model::SpnModel& m, std::size_t bound) {
  EngineConfig cfg;
  cfg.ignore_timing = true;
  Engine e(m, cfg);
  e.keep_events(false);
  e.init_marking();

  ReachableMarkings out;
  Marking start = e.marking();
  out.markings.insert(start);
  std::deque<Marking> frontier{start};
  while (!frontier.empty()) {
    Marking current = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& [iri, t] : m.transitions) {
      e.set_marking(current);
      for (const auto& b : e.enumerate_bindings(iri)) {
        e.set_marking(current);
        try {
          if (!e.is_enabled(b)) continue;
          e.fire(b);
        } catch (const DuplicateTokenError&) {
          continue;
        } catch (const ColorViolation&) {
          continue;
        }
        Marking next = e.marking();
        out.edges.emplace_back(current, b, next);
        if (out.markings.count(next)) continue;
        if (out.markings.size() >= bound) {
          out.truncated = true;
          continue;
        }
        out.markings.insert(next);
        frontier.push_back(std::move(next));
      }
    }
  }
  return out;
}

}  // namespace spn::runtime
