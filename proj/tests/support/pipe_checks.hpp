#pragma once

#include <algorithm>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "spn/cases/cases.hpp"
#include "spn/sparql/query.hpp"

namespace spn::testing {

// Lists every pipe whose counts break passed + failed = applicable <= intake
// or differ from a direct query joining the root class with the rule bodies.
inline std::vector<std::string> pipe_violations(const std::vector<cases::CheckingPipe>& pipes, const rdf::Graph& data,
                                                const cases::PipeReport& report) {
  using rdf::Term;
  std::vector<std::string> out;
  if (report.pipes.size() != pipes.size()) return {"report lists " + std::to_string(report.pipes.size()) + " pipes"};
  auto sorted = pipes;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  auto body = [](const model::Rule& r) -> std::string {
    if (auto* c = r.as<model::ConstantRule>()) return c->value.value() == "true" ? "" : "FILTER(1 = 2)";
    const auto& t = r.as<model::SparqlRule>()->text;
    return t.substr(t.find('{') + 1, t.rfind('}') - t.find('{') - 1);
  };
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    const auto& pipe = sorted[j];
    const auto& got = report.pipes[j];
    auto fail = [&](const std::string& what) { out.push_back(pipe.name + ": " + what); };
    if (got.name != pipe.name) {
      fail("listed as " + got.name);
      continue;
    }
    auto select = [&](const std::string& extra) {
      auto q = sparql::parse_sparql(
          "SELECT DISTINCT ?TOKEN { ?TOKEN a <" + pipe.root_class.value() + "> . " + extra + " }", data.prefixes());
      std::set<Term> s;
      for (const auto& row : sparql::evaluate(q, data).rows) s.insert(row.at("TOKEN"));
      return s;
    };
    const auto intake = select("");
    const auto applicable = select(body(pipe.applicability));
    const auto passed = select(body(pipe.applicability) + " . " + body(pipe.constraint));
    std::set<Term> expected_failed;
    std::set_difference(applicable.begin(), applicable.end(), passed.begin(), passed.end(),
                        std::inserter(expected_failed, expected_failed.end()));
    const std::set<Term> failed(got.failed.begin(), got.failed.end());
    if (got.intake != intake.size()) fail("intake " + std::to_string(got.intake) + " != " + std::to_string(intake.size()));
    if (got.applicable != applicable.size()) fail("applicable differs from direct query");
    if (got.passed != passed.size()) fail("passed differs from direct query");
    if (failed != expected_failed) fail("failed set differs from direct query");
    if (got.passed + failed.size() != got.applicable) fail("passed + failed != applicable");
    if (got.applicable > got.intake) fail("applicable > intake");
  }
  return out;
}

}  // namespace spn::testing
