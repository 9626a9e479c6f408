#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spn/cases/cases.hpp"
#include "spn/error.hpp"
#include "spn/model/model.hpp"
#include "spn/rdf/turtle.hpp"
#include "spn/runtime/engine.hpp"
#include "spn/sparql/query.hpp"
#include "spn/unfold/unfolder.hpp"

namespace fs = std::filesystem;
using namespace spn;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> models;
  std::string config;
  std::string out;
  std::string query;
  std::string schedule;
  std::optional<std::uint64_t> seed;
  std::optional<long long> ticks;
  std::size_t vocab_bound = 30;
  std::size_t max_markings = 100000;
  std::size_t entities = 120;
  std::size_t pipes = 12;
  bool strict_colors = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

fs::path out_dir(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec || !fs::is_directory(o.out)) throw UsageError("cannot create " + o.out);
  return o.out;
}

rdf::Graph load_graph(const std::vector<std::string>& files) {
  if (files.empty()) throw UsageError("--model is required");
  rdf::Graph g = rdf::Graph::with_default_prefixes();
  for (const auto& f : files) rdf::parse_turtle_into(g, read_file(f));
  return g;
}

// Config keys: seed, ticks, shuffle, strict_colors, duplicate_noop,
// min_ticks_between_moves, max_tokens {iri: n}, max_fires_per_tick {iri: n}.
runtime::EngineConfig engine_config(const Options& o) {
  runtime::EngineConfig c;
  if (!o.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(o.config));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(o.config + ": " + e.what());
    }
    c.seed = j.value("seed", c.seed);
    c.max_ticks = j.value("ticks", c.max_ticks);
    c.shuffle = j.value("shuffle", c.shuffle);
    c.strict_colors = j.value("strict_colors", c.strict_colors);
    c.duplicate_noop = j.value("duplicate_noop", c.duplicate_noop);
    if (j.contains("min_ticks_between_moves")) c.min_ticks_between_moves = j["min_ticks_between_moves"].get<std::size_t>();
    for (const auto& [k, v] : j.value("max_tokens", nlohmann::json::object()).items()) {
      c.max_tokens[rdf::Term::iri(k)] = v.get<std::size_t>();
    }
    for (const auto& [k, v] : j.value("max_fires_per_tick", nlohmann::json::object()).items()) {
      c.max_fires_per_tick[rdf::Term::iri(k)] = v.get<std::size_t>();
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (o.ticks) c.max_ticks = *o.ticks;
  if (o.strict_colors) c.strict_colors = true;
  return c;
}

int cmd_validate(const Options& o) {
  auto g = load_graph(o.models);
  auto m = model::load_model(std::move(g));
  std::cout << "ok: " << m.places.size() << " places, " << m.transitions.size() << " transitions, "
            << m.arcs.size() << " arcs\n";
  return kOk;
}

int cmd_run(const Options& o) {
  const auto dir = out_dir(o);
  runtime::Engine e(model::load_model(load_graph(o.models)), engine_config(o));
  e.init_marking();
  const auto stats = e.run();
  write_file(dir / "stats.json", runtime::stats_json(stats));
  write_file(dir / "events.ndjson", runtime::event_log(e.events()));
  write_file(dir / "snapshot.ttl", rdf::serialize_turtle(e.graph()));
  std::cout << "ticks " << stats.ticks_elapsed << ", firings " << stats.firings << ", rule checks "
            << stats.rule_checks << ", " << stats.wall_seconds << " s\n";
  if (!cases::is_case1_model(e.model())) return kOk;
  const auto r = cases::assess_case1(e);
  write_file(dir / "verdict.json", cases::verdict_json(r));
  std::cout << (r.feasible ? "FEASIBLE" : "INFEASIBLE") << " (" << r.stuck.size() << " stuck)\n";
  return r.feasible ? kOk : kFail;
}

int cmd_query(const Options& o) {
  if (o.query.empty()) throw UsageError("--query is required");
  auto g = load_graph(o.models);
  const auto text = read_file(o.query);
  sparql::QueryResult r;
  if (o.ticks) {
    auto c = engine_config(o);
    c.max_ticks = *o.ticks;
    runtime::Engine e(model::load_model(std::move(g)), c);
    e.init_marking();
    e.run();
    r = e.query_state(text);
  } else {
    r = sparql::evaluate(sparql::parse_sparql(text, g.prefixes()), g);
  }
  if (r.form == sparql::QueryForm::Ask) {
    std::cout << (r.boolean ? "true" : "false") << "\n";
    return kOk;
  }
  for (std::size_t i = 0; i < r.variables.size(); ++i) std::cout << (i ? "\t" : "") << "?" << r.variables[i];
  std::cout << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < r.variables.size(); ++i) {
      auto it = row.find(r.variables[i]);
      std::cout << (i ? "\t" : "") << (it == row.end() ? "" : it->second.to_ntriples());
    }
    std::cout << "\n";
  }
  return kOk;
}

int cmd_unfold(const Options& o) {
  const auto dir = out_dir(o);
  auto g = load_graph(o.models);
  if (!o.config.empty()) rdf::parse_turtle_into(g, read_file(o.config));
  const auto decl = unfold::read_declaration(g);
  const auto m = model::load_model(std::move(g));
  unfold::TabulateOptions opts;
  opts.vocab_bound = o.vocab_bound;
  const auto net = unfold::unfold(m, decl, opts);
  const auto reach = unfold::explore(net, o.max_markings);
  write_file(dir / "net.json", unfold::net_json(net) + "\n");
  write_file(dir / "reachability.json", unfold::reachability_json(net, reach) + "\n");
  std::size_t rows = 0;
  for (const auto& t : net.transitions) rows += t.rows.size();
  std::cout << net.places.size() << " places, " << net.transitions.size() << " transitions, " << rows
            << " rows, " << reach.markings.size() << " reachable markings" << (reach.truncated ? " (truncated)" : "")
            << "\n";
  return kOk;
}

int cmd_case1_gen(const Options& o) {
  const auto dir = out_dir(o);
  const auto b = o.config.empty() ? cases::SyntheticBuilding::desk() : cases::parse_building(read_file(o.config));
  const auto s = o.schedule.empty() ? cases::default_schedule(b) : cases::parse_schedule(read_file(o.schedule));
  const auto g = cases::generate_case1(b, s);
  write_file(dir / "model.ttl", rdf::serialize_turtle(g));
  write_file(dir / "building.json", cases::building_json(b));
  write_file(dir / "schedule.csv", cases::schedule_csv(s));
  std::cout << g.size() << " triples written to " << (dir / "model.ttl").string() << "\n";
  return kOk;
}

int cmd_pipes(const Options& o) {
  const auto dir = out_dir(o);
  rdf::Graph data;
  std::vector<cases::CheckingPipe> pipes;
  if (o.models.empty()) {
    data = cases::pipe_demo_data(o.entities, 4, o.seed.value_or(1));
  } else {
    data = load_graph(o.models);
  }
  if (o.config.empty()) {
    pipes = cases::pipe_demo_pipes(o.pipes, 4);
  } else {
    pipes = cases::parse_pipes(read_file(o.config), data.prefixes());
  }
  const auto report = cases::run_pipes(pipes, data);
  write_file(dir / "pipes.json", cases::pipe_report_json(report));
  for (const auto& p : report.pipes) {
    std::cout << p.name << ": intake " << p.intake << ", applicable " << p.applicable << ", passed " << p.passed
              << ", failed " << p.failed.size() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic Petri-Net engine"};
  app.require_subcommand(1);
  Options o;

  auto model_opt = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--model", o.models, "Turtle file(s); repeat to merge");
    if (required) opt->required();
  };
  auto* validate = app.add_subcommand("validate", "Load and validate model files");
  model_opt(validate, true);

  auto* run = app.add_subcommand("run", "Run a model and write stats, events and snapshot");
  model_opt(run, true);
  run->add_option("--config", o.config, "Engine config (JSON)");
  run->add_option("--out", o.out, "Output directory")->required();
  run->add_option("--seed", o.seed, "Random seed");
  run->add_option("--ticks", o.ticks, "Tick limit");
  run->add_flag("--strict-colors", o.strict_colors, "Raise on color violations");

  auto* query = app.add_subcommand("query", "Evaluate a SPARQL query over a model or snapshot");
  model_opt(query, true);
  query->add_option("--query", o.query, "Query file")->required();
  query->add_option("--ticks", o.ticks, "Run the model this many ticks first");
  query->add_option("--config", o.config, "Engine config (JSON)");
  query->add_option("--seed", o.seed, "Random seed");

  auto* unfold = app.add_subcommand("unfold", "Unfold to a colored net and explore it");
  model_opt(unfold, true);
  unfold->add_option("--config", o.config, "Mutable-predicate declaration (Turtle)");
  unfold->add_option("--out", o.out, "Output directory")->required();
  unfold->add_option("--vocab-bound", o.vocab_bound, "Largest token universe");
  unfold->add_option("--max-markings", o.max_markings, "Exploration bound");

  auto* gen = app.add_subcommand("case1-gen", "Generate a construction schedule model");
  gen->add_option("--config", o.config, "Building description (JSON); default is the desk building");
  gen->add_option("--schedule", o.schedule, "Schedule CSV; default fits the building");
  gen->add_option("--out", o.out, "Output directory")->required();

  auto* pipes = app.add_subcommand("pipes", "Run checking pipes over entity data");
  model_opt(pipes, false);
  pipes->add_option("--config", o.config, "Pipe definitions (JSON); default is the demo set");
  pipes->add_option("--out", o.out, "Output directory")->required();
  pipes->add_option("--seed", o.seed, "Seed for demo data");
  pipes->add_option("--entities", o.entities, "Demo entity count");
  pipes->add_option("--pipes", o.pipes, "Demo pipe count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*run) return cmd_run(o);
    if (*query) return cmd_query(o);
    if (*unfold) return cmd_unfold(o);
    if (*gen) return cmd_case1_gen(o);
    if (*pipes) return cmd_pipes(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.node << ": " << d.message << "\n";
    return kFail;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
