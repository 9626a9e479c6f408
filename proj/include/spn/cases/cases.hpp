#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spn/model/model.hpp"
#include "spn/rdf/graph.hpp"
#include "spn/runtime/engine.hpp"

namespace spn::cases {

using rdf::Term;

enum class Discipline { ST, AR, MEP };

std::string to_string(Discipline d);          // "ST"
std::string discipline_tag(Discipline d);     // "STRUCT"
std::string discipline_name(Discipline d);    // "Struct", used in transition names
Discipline parse_discipline(const std::string& s);

struct ScheduleEntry {
  std::string level;  // local name, e.g. "L1"
  Discipline discipline = Discipline::ST;
  long long start = 0;
  long long end = 0;
};

// level,discipline,start,end with an optional header line.
std::vector<ScheduleEntry> parse_schedule(const std::string& text);
std::string schedule_csv(const std::vector<ScheduleEntry>& s);

struct Category {
  std::string name;
  Discipline discipline = Discipline::ST;
  int states = 2;                     // 2: Uninstalled/Installed, 3: NotStarted/InProcessing/Finished
  std::size_t per_level = 0;
  std::optional<std::string> host;    // category hosting each object
  std::optional<std::size_t> max_in_process;
};

struct SyntheticBuilding {
  std::size_t levels = 2;
  std::vector<Category> categories;
  std::size_t max_fires_per_tick = 4;       // object transitions
  std::size_t min_ticks_between_moves = 1;  // object transitions; level transitions use 0

  // 2 levels, about 60 objects: walls and slabs with three states, openings
  // hosted by walls, windows and doors hosted by openings, columns and MEP.
  static SyntheticBuilding desk();
};

SyntheticBuilding parse_building(const std::string& json_text);
std::string building_json(const SyntheticBuilding& b);

// A schedule every level can meet under `b`'s quotas.
std::vector<ScheduleEntry> default_schedule(const SyntheticBuilding& b);

// Names shared by the generator, the verdict and the tests.
std::string level_name(std::size_t i);  // "L1", ...
std::vector<std::string> state_names(int states);
Term object_place(const std::string& category, const std::string& state);
Term level_place(Discipline d, const std::string& state);  // state in Start/Active/End
Term object_transition(const std::string& category, const std::string& step);
Term level_transition(const std::string& step, Discipline d);  // step in Start/End
Term object_iri(const std::string& level, const std::string& category, std::size_t i);
Term level_iri(const std::string& level);

// The complete SPN (domain data included) as a graph. Throws SpecError on
// inconsistent host chains.
rdf::Graph generate_case1(const SyntheticBuilding& b, const std::vector<ScheduleEntry>& schedule);

struct Stuck {
  Term place;
  Term token;
  Term transition;               // a transition that would move it
  std::vector<Term> blocking;    // guard rule nodes evaluating false
  std::string reason;            // "guard", or "constraint" when the guard holds
};

struct Case1Result {
  runtime::RunStats stats;
  std::vector<runtime::FiringRecord> events;
  bool feasible = false;
  std::vector<Stuck> stuck;
  runtime::Marking final_marking;
};

runtime::EngineConfig case1_config(long long ticks = 90, std::uint64_t seed = 1);
Case1Result run_case1(const rdf::Graph& g, const runtime::EngineConfig& config = case1_config());
// Verdict for an engine that has already run.
Case1Result assess_case1(const runtime::Engine& e);
// True if some place carries a state-chain tag.
bool is_case1_model(const model::SpnModel& m);

std::string verdict_json(const Case1Result& r);

// Position of a place along its state chain (START 0, ACTIVE 1, END 2), or -1.
int chain_rank(const model::SpnModel& m, const Term& place);

struct CheckingPipe {
  std::string name;
  Term root_class;
  model::Rule applicability;
  model::Rule constraint;
  Term p1, p2, p3;
};

// Rules are boolean over ?TOKEN. Non-boolean rules raise TypeError.
CheckingPipe build_pipe(const std::string& name, const Term& root_class, model::Rule applicability,
                        model::Rule constraint);
// Text form: "true"/"false" become constant rules, anything else is SPARQL.
CheckingPipe build_pipe(const std::string& name, const Term& root_class, const std::string& applicability,
                        const std::string& constraint, const rdf::PrefixMap& prefixes);

struct PipeResult {
  std::string name;
  std::size_t intake = 0;
  std::size_t applicable = 0;
  std::size_t passed = 0;
  std::vector<Term> failed;
};

struct PipeReport {
  std::vector<PipeResult> pipes;
  runtime::RunStats stats;
};

// All pipes as one net over `data`, run to quiescence. Results are listed in
// pipe-name order.
PipeReport run_pipes(const std::vector<CheckingPipe>& pipes, const rdf::Graph& data);
std::string pipe_report_json(const PipeReport& r);

// Pipe definitions: [{"name", "root_class", "applicability", "constraint"}].
std::vector<CheckingPipe> parse_pipes(const std::string& json_text, const rdf::PrefixMap& prefixes);

// Synthetic entities for pipes: `entities` instances spread over classes
// proj:C0..C{classes-1}, each with a random subset of proj:p0..proj:p3.
rdf::Graph pipe_demo_data(std::size_t entities, std::size_t classes, std::uint64_t seed);
// Property-existence pipes over the demo classes and properties.
std::vector<CheckingPipe> pipe_demo_pipes(std::size_t count, std::size_t classes);

}  // namespace spn::cases
