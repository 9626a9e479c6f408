#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "spn/model/model.hpp"
#include "spn/sparql/query.hpp"

namespace spn::runtime {

using rdf::Term;

// place -> tokens. Every model place has an entry, possibly empty.
using Marking = std::map<Term, std::set<Term>>;

struct TransitionBinding {
  Term transition;
  sparql::Solution assignment;  // arg name without '?' -> token
  friend bool operator==(const TransitionBinding&, const TransitionBinding&) = default;
};

struct EngineConfig {
  std::map<Term, std::size_t> max_tokens;          // per place; overrides spnx:maxTokens
  std::map<Term, std::size_t> max_fires_per_tick;  // per transition; overrides spnx:maxFiresPerTick
  std::optional<std::size_t> min_ticks_between_moves;
  std::uint64_t seed = 1;
  bool shuffle = false;  // seeded random transition order within each sweep
  long long max_ticks = 90;
  bool strict_colors = false;
  bool duplicate_noop = false;
  bool short_circuit = false;
  bool ignore_timing = false;  // drop quotas and move spacing (exhaustive exploration)
  std::size_t max_firings_per_tick = 1000000;
};

struct FiringRecord {
  long long tick = 0;
  Term transition;
  sparql::Solution binding;
  std::vector<std::pair<Term, Term>> consumed;  // (place, token)
  std::vector<std::pair<Term, Term>> produced;
};

struct TickReport {
  long long tick = 0;
  std::size_t firings = 0;
  std::size_t rule_checks = 0;
  bool quiescent = false;
};

struct RunStats {
  long long ticks_elapsed = 0;
  std::size_t rule_checks = 0;
  std::size_t leaf_checks = 0;
  std::size_t firings = 0;
  std::map<Term, std::size_t> per_transition;
  std::map<Term, std::size_t> per_place;
  double wall_seconds = 0;
};

// Engine-namespace IRIs used for constraints and bookkeeping.
namespace engine_terms {
Term clock();
Term current_tick();
Term last_move_tick();
Term fires_in_tick();
Term max_tokens();
Term max_fires_per_tick();
Term min_ticks_between_moves();
Term shares_tokens();
Term read_arc();
}  // namespace engine_terms

class Engine {
 public:
  Engine(model::SpnModel model, EngineConfig config = {});

  const model::SpnModel& model() const { return model_; }
  const rdf::Graph& graph() const { return model_.graph; }
  const EngineConfig& config() const { return config_; }

  void init_marking();
  Marking marking() const;
  // Replaces the marking (keeps direct-container membership in sync).
  void set_marking(const Marking& m);

  std::vector<TransitionBinding> enumerate_bindings(const Term& transition) const;
  bool is_enabled(const TransitionBinding& b);
  FiringRecord fire(const TransitionBinding& b);
  // The firing `b` would perform now, or nothing if it is not enabled or
  // would raise a duplicate-token or color error. Never mutates state.
  std::optional<FiringRecord> preview(const TransitionBinding& b);
  TickReport step_tick();
  RunStats run();

  sparql::QueryResult query_state(const std::string& text) const;

  long long current_tick() const { return tick_; }
  const RunStats& stats() const { return stats_; }
  const std::vector<FiringRecord>& events() const { return events_; }
  void keep_events(bool on) { keep_events_ = on; }

  // True if some rule reads the clock.
  bool reads_clock() const { return reads_clock_; }

 private:
  struct Plan {
    std::vector<std::pair<Term, Term>> consumed;
    std::vector<std::pair<Term, Term>> produced;
  };
  enum class Check { Enabled, Disabled, TimeBlocked };

  Check check(const TransitionBinding& b, Plan* plan);
  bool build_plan(const TransitionBinding& b, Plan& plan, bool throw_errors);
  std::vector<std::pair<Term, Term>> validate(const Plan& plan);
  FiringRecord apply(const TransitionBinding& b, const Plan& plan);

  bool contains(const Term& place, const Term& token) const;
  void add_token(const Term& place, const Term& token);
  void drop_token(const Term& place, const Term& token);
  bool sharing(const Term& place) const;
  std::optional<std::size_t> capacity(const Term& place) const;
  std::optional<std::size_t> quota(const Term& transition) const;
  std::size_t spacing(const Term& transition) const;
  bool color_ok(const Term& place, const Term& token);
  void check_exclusive(const Term& place, const Term& token) const;
  void set_clock(long long tick);

  model::SpnModel model_;
  EngineConfig config_;
  model::EvalOptions eval_options_;
  std::size_t leaf_counter_ = 0;
  long long tick_ = 0;
  bool initialized_ = false;
  bool reads_clock_ = false;
  bool time_blocked_ = false;
  std::map<Term, std::size_t> fired_this_tick_;
  std::map<Term, long long> last_move_;
  std::vector<FiringRecord> events_;
  bool keep_events_ = true;
  RunStats stats_;
  std::mt19937_64 rng_;
  std::vector<Term> transition_order_;
  // Direct-container places: place -> (membership resource, member relation).
  std::map<Term, std::pair<Term, Term>> members_;
};

// NDJSON line for one firing. Terms are written in N-Triples form.
std::string to_json_line(const FiringRecord& r);
std::string event_log(const std::vector<FiringRecord>& records);
// Stable JSON summary without wall time.
std::string stats_json(const RunStats& s);

// Reachable markings under all interleavings, ignoring the clock.
struct ReachableMarkings {
  std::set<Marking> markings;
  std::vector<std::tuple<Marking, TransitionBinding, Marking>> edges;
  bool truncated = false;
};
ReachableMarkings explore_markings(const model::SpnModel& m, std::size_t bound);

}  // namespace spn::runtime
