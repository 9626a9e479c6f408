#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "spn/cases/cases.hpp"
#include "spn/rdf/turtle.hpp"
#include "support/fixtures.hpp"

using namespace spn;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("spn_cli_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

const fs::path& scratch() {
  static const Scratch s;
  return s.dir;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name), std::ios::binary) << text; }

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result spn_cli(const std::string& args) {
  const std::string out = path("stdout.txt");
  const std::string err = path("stderr.txt");
  const std::string cmd = std::string(SPN_CLI) + " " + args + " >" + out + " 2>" + err;
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

// Transition T moves a token A -> B only while the flag sits in R; U moves
// the flag to Z. Reachable: 4 markings with the flag in R, the same 4 with it
// in Z.
const char* kRemote = R"(
proj:A a spn:Place ; ldp:contains proj:a , proj:b .
proj:B a spn:Place .
proj:R a spn:Place ; ldp:contains proj:flag .
proj:Z a spn:Place .
proj:T a spn:Transition ; spn:hasArg "?x" ; spn:guardRule proj:g .
proj:g a spn:SPARQLRule ; spn:hasSPARQL "ASK { proj:R ldp:contains proj:flag }" .
proj:in a spn:ArcP2T ; spn:relPlace proj:A ; spn:relTransition proj:T ; spn:hasArg "?x" .
proj:out a spn:ArcT2P ; spn:relPlace proj:B ; spn:relTransition proj:T ; spn:hasArg "?x" .
proj:U a spn:Transition ; spn:hasArg "?f" .
proj:u_in a spn:ArcP2T ; spn:relPlace proj:R ; spn:relTransition proj:U ; spn:hasArg "?f" .
proj:u_out a spn:ArcT2P ; spn:relPlace proj:Z ; spn:relTransition proj:U ; spn:hasArg "?f" .
)";

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(spn_cli("").code == 2);
  CHECK(spn_cli("bogus").code == 2);
  CHECK(spn_cli("validate").code == 2);
  CHECK(spn_cli("validate --model " + path("missing.ttl")).code == 2);
  CHECK(spn_cli("--help").code == 0);
}

TEST_CASE("validate") {
  write("level_end.ttl", testing::level_end_micro_model("P_ST_End"));
  auto ok = spn_cli("validate --model " + path("level_end.ttl"));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("ok:") == 0);

  std::string broken = testing::level_end_micro_model("P_ST_End");
  broken.replace(broken.find("spn:relPlace proj:P_Level ;"), 27, "");
  write("broken.ttl", broken);
  auto bad = spn_cli("validate --model " + path("broken.ttl"));
  CHECK(bad.code == 1);
  CHECK(bad.err.find("relPlace 1:1") != std::string::npos);
  CHECK(bad.err.find("arc_in") != std::string::npos);

  write("empty.ttl", "");
  auto empty = spn_cli("validate --model " + path("empty.ttl"));
  CHECK(empty.code == 1);
  CHECK(empty.err.find("no SPN nodes found") != std::string::npos);

  write("syntax.ttl", "proj:a proj:b");
  CHECK(spn_cli("validate --model " + path("syntax.ttl")).code == 1);
}

TEST_CASE("run: deterministic outputs, inputs untouched") {
  write("level_end.ttl", testing::level_end_micro_model("P_ST_End"));
  const auto before = slurp(path("level_end.ttl"));
  REQUIRE(spn_cli("run --model " + path("level_end.ttl") + " --seed 3 --out " + path("run1")).code == 0);
  REQUIRE(spn_cli("run --model " + path("level_end.ttl") + " --seed 3 --out " + path("run2")).code == 0);
  CHECK(slurp(path("level_end.ttl")) == before);
  for (const char* f : {"stats.json", "events.ndjson", "snapshot.ttl"}) {
    CHECK(!slurp(path("run1/") + f).empty());
    CHECK(slurp(path("run1/") + f) == slurp(path("run2/") + f));
  }
  CHECK(nlohmann::json::parse(slurp(path("run1/verdict.json")))["verdict"] == "FEASIBLE");

  auto events = slurp(path("run1/events.ndjson"));
  CHECK(std::count(events.begin(), events.end(), '\n') == 1);
  CHECK(events.find("T_Level_End_Struct") != std::string::npos);
  auto stats = nlohmann::json::parse(slurp(path("run1/stats.json")));
  CHECK(stats["firings"] == 1);

  auto snapshot = rdf::parse_turtle(slurp(path("run1/snapshot.ttl")));
  CHECK(snapshot.contains({testing::proj("P_Level_Done"), rdf::Term::iri(ns::ldp_("contains")), testing::proj("L1")}));

  REQUIRE(spn_cli("run --model " + path("level_end.ttl") + " --ticks 0 --out " + path("run0")).code == 0);
  CHECK(slurp(path("run0/events.ndjson")).empty());
}

TEST_CASE("run: config file and flags") {
  write("level_end.ttl", testing::level_end_micro_model("P_ST_End"));
  write("cfg.json", R"({"ticks": 0, "seed": 9})");
  REQUIRE(spn_cli("run --model " + path("level_end.ttl") + " --config " + path("cfg.json") + " --out " + path("c0")).code == 0);
  CHECK(slurp(path("c0/events.ndjson")).empty());
  REQUIRE(spn_cli("run --model " + path("level_end.ttl") + " --config " + path("cfg.json") + " --ticks 5 --out " +
                  path("c5")).code == 0);
  CHECK(!slurp(path("c5/events.ndjson")).empty());
  write("bad.json", "{");
  CHECK(spn_cli("run --model " + path("level_end.ttl") + " --config " + path("bad.json") + " --out " + path("cb")).code ==
        2);
}

TEST_CASE("case1-gen and run verdicts") {
  REQUIRE(spn_cli("case1-gen --out " + path("gen")).code == 0);
  CHECK(cases::parse_building(slurp(path("gen/building.json"))).categories.size() ==
        cases::SyntheticBuilding::desk().categories.size());
  auto feasible = spn_cli("run --model " + path("gen/model.ttl") + " --out " + path("gen/run"));
  CHECK(feasible.code == 0);
  auto verdict = nlohmann::json::parse(slurp(path("gen/run/verdict.json")));
  CHECK(verdict["verdict"] == "FEASIBLE");
  CHECK(verdict["stuck"].empty());

  write("late.csv", "level,discipline,start,end\nL1,ST,3,30\nL1,AR,0,2\nL1,MEP,0,30\n");
  write("tiny.json", cases::building_json([] {
          auto b = cases::SyntheticBuilding::desk();
          b.levels = 1;
          return b;
        }()));
  REQUIRE(spn_cli("case1-gen --config " + path("tiny.json") + " --schedule " + path("late.csv") + " --out " +
                  path("late")).code == 0);
  auto infeasible = spn_cli("run --model " + path("late/model.ttl") + " --out " + path("late/run"));
  CHECK(infeasible.code == 1);
  verdict = nlohmann::json::parse(slurp(path("late/run/verdict.json")));
  CHECK(verdict["verdict"] == "INFEASIBLE");
  REQUIRE_FALSE(verdict["stuck"].empty());
  CHECK_FALSE(verdict["stuck"][0]["blocking"].empty());

  write("cyclic.json", R"({"levels": 1, "categories": [
    {"name": "a", "discipline": "ST", "states": 2, "per_level": 1, "host": "b"},
    {"name": "b", "discipline": "ST", "states": 2, "per_level": 1, "host": "a"}]})");
  CHECK(spn_cli("case1-gen --config " + path("cyclic.json") + " --out " + path("cyc")).code == 1);
}

TEST_CASE("query") {
  write("level_end.ttl", testing::level_end_micro_model("P_ST_End"));
  write("done.rq", "PREFIX ldp: <http://www.w3.org/ns/ldp#>\nASK { proj:P_Level_Done ldp:contains proj:L1 }\n");
  CHECK(spn_cli("query --model " + path("level_end.ttl") + " --query " + path("done.rq")).out == "false\n");
  CHECK(spn_cli("query --model " + path("level_end.ttl") + " --query " + path("done.rq") + " --ticks 1").out == "true\n");

  write("elems.rq", "SELECT ?e { proj:P_ST_End ldp:contains ?e }");
  auto r = spn_cli("query --model " + path("level_end.ttl") + " --query " + path("elems.rq"));
  CHECK(r.code == 0);
  CHECK(r.out == "?e\n<https://example.org/proj#e1>\n<https://example.org/proj#e2>\n<https://example.org/proj#e3>\n");

  write("bad.rq", "DESCRIBE ?x");
  CHECK(spn_cli("query --model " + path("level_end.ttl") + " --query " + path("bad.rq")).code == 1);
}

TEST_CASE("unfold") {
  write("remote.ttl", kRemote);
  auto r = spn_cli("unfold --model " + path("remote.ttl") + " --out " + path("unf"));
  REQUIRE(r.code == 0);
  auto reach = nlohmann::json::parse(slurp(path("unf/reachability.json")));
  CHECK(reach["truncated"] == false);
  CHECK(reach["markings"].size() == 8);
  auto net = nlohmann::json::parse(slurp(path("unf/net.json")));
  CHECK(!net.empty());

  REQUIRE(spn_cli("run --model " + path("remote.ttl") + " --out " + path("unf_run")).code == 0);
  CHECK_FALSE(fs::exists(path("unf_run/verdict.json")));

  CHECK(spn_cli("unfold --model " + path("remote.ttl") + " --vocab-bound 2 --out " + path("unf2")).code == 1);
  auto truncated = spn_cli("unfold --model " + path("remote.ttl") + " --max-markings 3 --out " + path("unf3"));
  CHECK(truncated.code == 0);
  CHECK(nlohmann::json::parse(slurp(path("unf3/reachability.json")))["truncated"] == true);
}

TEST_CASE("pipes") {
  REQUIRE(spn_cli("pipes --entities 100 --pipes 10 --seed 4 --out " + path("pd")).code == 0);
  auto report = nlohmann::json::parse(slurp(path("pd/pipes.json")));
  CHECK(report["pipes"].size() == 10);
  for (const auto& p : report["pipes"]) {
    CHECK(p["passed"].get<std::size_t>() + p["failed"].size() == p["applicable"].get<std::size_t>());
    CHECK(p["applicable"] <= p["intake"]);
  }

  write("data.ttl", R"(
proj:a a proj:Wall ; proj:fire "60" .
proj:b a proj:Wall .
proj:c a proj:Slab .
)");
  write("pipes.json", R"([{"name": "fire", "root_class": "https://example.org/proj#Wall",
    "applicability": "true", "constraint": "ASK { ?TOKEN proj:fire ?r }"}])");
  REQUIRE(spn_cli("pipes --model " + path("data.ttl") + " --config " + path("pipes.json") + " --out " + path("pw"))
              .code == 0);
  report = nlohmann::json::parse(slurp(path("pw/pipes.json")));
  REQUIRE(report["pipes"].size() == 1);
  CHECK(report["pipes"][0]["intake"] == 2);
  CHECK(report["pipes"][0]["passed"] == 1);
  CHECK(report["pipes"][0]["failed"] == nlohmann::json::array({"https://example.org/proj#b"}));
}
