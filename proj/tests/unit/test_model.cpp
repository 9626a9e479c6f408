#include <algorithm>
#include <random>

#include "doctest.h"
#include "spn/error.hpp"
#include "spn/model/model.hpp"
#include "spn/rdf/turtle.hpp"
#include "spn/rdf/vocab.hpp"
#include "support/fixtures.hpp"
#include "support/sparql_oracle.hpp"

using namespace spn;
using namespace spn::model;
using rdf::Term;
using spn::testing::proj;

namespace {

SpnModel load(const std::string& text) { return load_model(rdf::parse_turtle(text)); }

std::vector<Diagnostic> diagnostics_of(const std::string& text) {
  try {
    load(text);
  } catch (const ValidationError& e) {
    return e.diagnostics();
  }
  return {};
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& fragment) {
  return std::any_of(ds.begin(), ds.end(),
                     [&](const Diagnostic& d) { return d.message.find(fragment) != std::string::npos; });
}

const char* kMove = R"(
proj:A a spn:Place .
proj:B a spn:Place .
proj:T a spn:Transition ; spn:hasArg "?x" .
proj:in a spn:ArcP2T ; spn:relPlace proj:A ; spn:relTransition proj:T ; spn:hasArg "?x" .
proj:out a spn:ArcT2P ; spn:relPlace proj:B ; spn:relTransition proj:T ; spn:hasArg "?x" .
)";

Rule constant(bool v, const std::string& id) { return Rule(proj(id), ConstantRule{Term::boolean(v)}); }

Rule compound(LogicOp op, std::vector<Rule> subs, const std::string& id) {
  return Rule(proj(id), CompoundRule{op, std::move(subs)});
}

}  // namespace

TEST_CASE("level-end listing with a place and an input arc loads") {
  std::string text = spn::testing::level_end_listing() + R"(
proj:P_Level a spn:Place .
proj:arc_in a spn:ArcP2T ; spn:relPlace proj:P_Level ; spn:relTransition proj:T_Level_End_Struct ;
  spn:hasArg "?TOKEN" .
)";
  auto m = load(text);
  REQUIRE(m.transitions.size() == 1);
  const auto& t = m.transitions.at(proj("T_Level_End_Struct"));
  REQUIRE(t.guard);
  auto* c = t.guard->as<CompoundRule>();
  REQUIRE(c != nullptr);
  CHECK(c->op == LogicOp::Not);
  REQUIRE(c->subrules.size() == 1);
  CHECK(c->subrules[0].as<SparqlRule>() != nullptr);
  REQUIRE(t.args.size() == 1);
  CHECK(t.args[0].name == "?TOKEN");
  CHECK(t.args[0].allowed_types.empty());
  CHECK(annotation(t.annotations, ns::bimsn_("disciplineTag")) == Term::literal("STRUCT"));
}

TEST_CASE("cardinality and subset violations") {
  SUBCASE("two color rules") {
    auto ds = diagnostics_of(std::string(kMove) + R"(
proj:A spn:colorRule proj:c1 , proj:c2 .
proj:c1 a spn:ConstantRule ; spn:hasValue true .
proj:c2 a spn:ConstantRule ; spn:hasValue true .
)");
    CHECK(mentions(ds, "colorRule 0:1"));
  }
  SUBCASE("two args without expression") {
    auto ds = diagnostics_of(R"(
proj:A a spn:Place .
proj:T a spn:Transition ; spn:hasArg "?x" , "?y" .
proj:in a spn:ArcP2T ; spn:relPlace proj:A ; spn:relTransition proj:T ; spn:hasArg "?x" , "?y" .
)");
    CHECK(mentions(ds, "has 2 args but no arcExpr"));
  }
  SUBCASE("arc arg outside transition args") {
    auto ds = diagnostics_of(std::string(kMove) + R"(
proj:in2 a spn:ArcP2T ; spn:relPlace proj:A ; spn:relTransition proj:T ; spn:hasArg "?Y" .
)");
    CHECK(mentions(ds, "arc arg ?Y not among transition args"));
  }
  SUBCASE("missing relPlace") {
    auto ds = diagnostics_of(R"(
proj:T a spn:Transition ; spn:hasArg "?x" .
proj:in a spn:ArcP2T ; spn:relTransition proj:T ; spn:hasArg "?x" .
)");
    CHECK(mentions(ds, "relPlace 1:1"));
  }
  SUBCASE("NOT with three sub-rules") {
    auto ds = diagnostics_of(std::string(kMove) + R"(
proj:T spn:guardRule proj:n .
proj:n a spn:CompoundRule ; spn:operator "NOT" ; spn:subRule proj:c1 , proj:c2 , proj:c3 .
proj:c1 a spn:ConstantRule ; spn:hasValue true .
proj:c2 a spn:ConstantRule ; spn:hasValue true .
proj:c3 a spn:ConstantRule ; spn:hasValue true .
)");
    CHECK(mentions(ds, "NOT rule with 3 sub-rules"));
  }
  SUBCASE("transition without args") {
    auto ds = diagnostics_of("proj:T a spn:Transition .");
    CHECK(mentions(ds, "hasArg 1:?"));
  }
  SUBCASE("abstract arc class") {
    auto ds = diagnostics_of(std::string(kMove) + "proj:x a spn:Arc .");
    CHECK(mentions(ds, "abstract"));
  }
  SUBCASE("arg with no candidate source") {
    auto ds = diagnostics_of(std::string(kMove) + R"(proj:T spn:hasArg "?z" .)");
    CHECK(mentions(ds, "?z has no candidate source"));
  }
  SUBCASE("malformed SPARQL fails at load") {
    auto ds = diagnostics_of(std::string(kMove) + R"(
proj:T spn:guardRule proj:g .
proj:g a spn:SPARQLRule ; spn:hasSPARQL "ASK { ?x ?p }" .
)");
    CHECK(mentions(ds, "invalid SPARQL"));
  }
  SUBCASE("empty graph") {
    auto ds = diagnostics_of("");
    CHECK(mentions(ds, "no SPN nodes found"));
  }
}

TEST_CASE("SELECT guard is a load-time type error") {
  CHECK_THROWS_AS(load(std::string(kMove) + R"(
proj:T spn:guardRule proj:g .
proj:g a spn:SPARQLRule ; spn:hasSPARQL "SELECT ?y { ?y a proj:C }" .
)"),
                  TypeError);
  CHECK_THROWS_AS(load(std::string(kMove) + R"(
proj:T spn:guardRule proj:g .
proj:g a spn:CompoundRule ; spn:operator "AND" ; spn:subRule proj:s .
proj:s a spn:SPARQLRule ; spn:hasSPARQL "SELECT ?y { ?y a proj:C }" .
)"),
                  TypeError);
}

TEST_CASE("ArgDef nodes with types") {
  auto m = load(R"(
proj:A a spn:Place .
proj:T a spn:Transition ; spn:hasArg _:w .
_:w a spn:ArgDef ; spn:argName "?w" ; spn:argType ifc4:IfcWall .
proj:in a spn:ArcP2T ; spn:relPlace proj:A ; spn:relTransition proj:T ; spn:hasArg "?w" .
)");
  const auto& t = m.transitions.begin()->second;
  REQUIRE(t.args.size() == 1);
  CHECK(t.args[0].allowed_types == std::vector<Term>{Term::iri(ns::ifc4_("IfcWall"))});
}

TEST_CASE("constant and compound evaluation") {
  rdf::Graph g;
  Term self = proj("T");
  CHECK(eval_boolean(constant(true, "c"), g, {}, self));
  CHECK(eval_boolean(compound(LogicOp::Not, {constant(false, "c")}, "n"), g, {}, self));
  CHECK(eval_terms(constant(true, "c"), g, {}, self) == TermSet{Term::boolean(true)});
  Rule non_boolean(proj("k"), ConstantRule{proj("thing")});
  CHECK_THROWS_AS(eval_boolean(non_boolean, g, {}, self), TypeError);
  auto xor3 = compound(LogicOp::Xor, {constant(true, "a"), constant(true, "b"), constant(true, "c")}, "x");
  CHECK(eval_boolean(xor3, g, {}, self));
}

TEST_CASE("level-end guard direction matches the ASK oracle") {
  for (const char* place : {"P_ST_Start", "P_ST_Active", "P_ST_End", "P_AR_Active"}) {
    CAPTURE(place);
    auto m = load(spn::testing::level_end_micro_model(place));
    const auto& t = m.transitions.at(proj("T_Level_End_Struct"));
    sparql::Solution b{{"TOKEN", proj("L1")}};
    bool guard = eval_boolean(*t.guard, m.graph, b, t.iri);

    const auto& ask = t.guard->as<CompoundRule>()->subrules[0].as<SparqlRule>()->query;
    sparql::Solution with_self = b;
    with_self["SELF"] = t.iri;
    bool oracle = spn::testing::brute_force_evaluate(ask, m.graph, with_self).boolean;
    CHECK(guard == !oracle);
    bool all_done = std::string(place) == "P_ST_End" || std::string(place) == "P_AR_Active";
    CHECK(guard == all_done);
  }
}

TEST_CASE("rule trees round-trip through RDF") {
  auto round = [](const Rule& r) {
    rdf::Graph g = rdf::Graph::with_default_prefixes();
    for (const auto& t : rule_to_rdf(r)) g.insert(t);
    return rdf_to_rule(g, r.node());
  };
  SUBCASE("level-end rule pair") {
    auto m = load(spn::testing::level_end_micro_model());
    const Rule& guard = *m.transitions.begin()->second.guard;
    CHECK(round(guard) == guard);
  }
  SUBCASE("condition rule") {
    Rule r(proj("cond"), ConditionRule{constant(true, "i"), constant(false, "t"), constant(true, "e")});
    CHECK(round(r) == r);
  }
  SUBCASE("self cycle") {
    auto g = rdf::parse_turtle(R"(proj:r a spn:CompoundRule ; spn:operator "NOT" ; spn:subRule proj:r .)");
    CHECK_THROWS_AS(rdf_to_rule(g, proj("r")), ValidationError);
  }
  SUBCASE("shared sub-rule") {
    auto g = rdf::parse_turtle(R"(
proj:r a spn:CompoundRule ; spn:operator "AND" ; spn:subRule proj:a , proj:b .
proj:a a spn:CompoundRule ; spn:operator "NOT" ; spn:subRule proj:c .
proj:b a spn:CompoundRule ; spn:operator "NOT" ; spn:subRule proj:c .
proj:c a spn:ConstantRule ; spn:hasValue true .
)");
    CHECK_THROWS_AS(rdf_to_rule(g, proj("r")), ValidationError);
  }
}

TEST_CASE("property: AND/OR/XOR ignore sub-rule order") {
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round) {
    std::vector<Rule> subs;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) subs.push_back(constant(rng() % 2, "s" + std::to_string(i)));
    for (LogicOp op : {LogicOp::And, LogicOp::Or, LogicOp::Xor}) {
      bool before = eval_boolean(compound(op, subs, "r"), rdf::Graph{}, {}, proj("T"));
      auto shuffled = subs;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      bool after = eval_boolean(compound(op, shuffled, "r"), rdf::Graph{}, {}, proj("T"));
      CHECK(before == after);
      EvalOptions fast;
      fast.short_circuit = true;
      CHECK(eval_boolean(compound(op, shuffled, "r"), rdf::Graph{}, {}, proj("T"), fast) == before);
    }
  }
}

TEST_CASE("property: condition rules evaluate exactly one branch") {
  for (bool test : {true, false}) {
    Rule r(proj("cond"), ConditionRule{constant(test, "i"), constant(false, "t"), constant(true, "e")});
    std::vector<Term> visited;
    EvalOptions opts;
    opts.trace = [&](const Rule& node) { visited.push_back(node.node()); };
    bool v = eval_boolean(r, rdf::Graph{}, {}, proj("T"), opts);
    CHECK(v == !test);
    int then_seen = static_cast<int>(std::count(visited.begin(), visited.end(), proj("t")));
    int else_seen = static_cast<int>(std::count(visited.begin(), visited.end(), proj("e")));
    CHECK(then_seen + else_seen == 1);
    CHECK(then_seen == (test ? 1 : 0));
  }
}

TEST_CASE("property: load, export, load gives an equal model") {
  std::vector<std::string> models = {
      spn::testing::level_end_micro_model(),
      std::string(kMove),
      std::string(kMove) + R"(
proj:A spn:initRule proj:init ; spn:colorRule proj:color .
proj:init a spn:SPARQLRule ; spn:hasSPARQL "SELECT ?x { ?x a proj:C }" .
proj:color a spn:ConditionRule ; spn:if proj:i ; spn:then proj:t ; spn:else proj:e .
proj:i a spn:SPARQLRule ; spn:hasSPARQL "ASK { ?TOKEN a proj:C }" .
proj:t a spn:ConstantRule ; spn:hasValue true .
proj:e a spn:ConstantRule ; spn:hasValue false .
proj:T spn:hasArg _:y .
_:y a spn:ArgDef ; spn:argName "?y" ; spn:argType proj:C , proj:D .
proj:gen a spn:ArcT2P ; spn:relPlace proj:B ; spn:relTransition proj:T ; spn:hasArg "?y" ; spn:arcExpr proj:sel .
proj:sel a spn:SPARQLRule ; spn:hasSPARQL "SELECT ?y { ?y a proj:D }" .
proj:c1 a proj:C . proj:d1 a proj:D .
)",
  };
  for (const auto& text : models) {
    auto first = load(text);
    rdf::Graph exported = model_to_rdf(first);
    CHECK(check_cardinalities(exported).empty());
    auto second = load_model(rdf::parse_turtle(rdf::serialize_turtle(exported)));
    CHECK(first.same_structure(second));
  }
}
