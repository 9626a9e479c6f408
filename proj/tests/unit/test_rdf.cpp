#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "spn/error.hpp"
#include "spn/rdf/turtle.hpp"
#include "spn/rdf/vocab.hpp"
#include "support/graph_iso.hpp"

using namespace spn;
using rdf::Graph;
using rdf::Term;
using rdf::Triple;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Term ex(const std::string& local) { return Term::iri("http://e/" + local); }

}  // namespace

TEST_CASE("minimal document yields one triple") {
  auto g = rdf::parse_turtle("@prefix ex: <http://e/>. ex:s ex:p ex:o.");
  REQUIRE(g.size() == 1);
  CHECK(g.contains({ex("s"), ex("p"), ex("o")}));
}

TEST_CASE("object lists share subject and predicate") {
  auto g = rdf::parse_turtle("@prefix ex: <http://e/>. ex:s ex:p \"x\", \"y\".");
  REQUIRE(g.size() == 2);
  CHECK(g.contains({ex("s"), ex("p"), Term::literal("x")}));
  CHECK(g.contains({ex("s"), ex("p"), Term::literal("y")}));
}

TEST_CASE("level-end listing parses with its multi-line ASK string") {
  auto g = rdf::parse_turtle(read_file("data/level_end_listing.ttl"));
  CHECK(g.size() >= 9);
  auto sparql = g.objects(Term::iri(ns::proj + std::string("sprule_1")), Term::iri(ns::spn_("hasSPARQL")));
  REQUIRE(sparql.size() == 1);
  CHECK(sparql[0].value().rfind("ASK {", 0) == 0);
  CHECK(sparql[0].value().find('\n') != std::string::npos);
  CHECK(sparql[0].value().find("?sTag != 'END'") != std::string::npos);
  auto args = g.objects(Term::iri(ns::proj + std::string("T_Level_End_Struct")), Term::iri(ns::spn_("hasArg")));
  REQUIRE(args.size() == 1);
  CHECK(args[0] == Term::literal("?TOKEN"));
}

TEST_CASE("literal forms") {
  auto g = rdf::parse_turtle(R"(@prefix ex: <http://e/>.
    ex:s ex:int 42 ; ex:dec -1.5 ; ex:dbl 2e3 ; ex:t true ; ex:lang "chat"@fr ;
         ex:typed "7"^^xsd:integer ; ex:str "q"^^xsd:string ; ex:long """a "quoted"
line""" ; ex:esc "tab\thereA" ; ex:single 'x' .)");
  CHECK(g.contains({ex("s"), ex("int"), Term::integer(42)}));
  CHECK(g.contains({ex("s"), ex("dec"), Term::typed("-1.5", ns::xsd_("decimal"))}));
  CHECK(g.contains({ex("s"), ex("dbl"), Term::typed("2e3", ns::xsd_("double"))}));
  CHECK(g.contains({ex("s"), ex("t"), Term::boolean(true)}));
  CHECK(g.contains({ex("s"), ex("lang"), Term::lang_literal("chat", "fr")}));
  CHECK(g.contains({ex("s"), ex("typed"), Term::integer(7)}));
  CHECK(g.contains({ex("s"), ex("str"), Term::literal("q")}));
  CHECK(g.contains({ex("s"), ex("long"), Term::literal("a \"quoted\"\nline")}));
  CHECK(g.contains({ex("s"), ex("esc"), Term::literal("tab\thereA")}));
  CHECK(g.contains({ex("s"), ex("single"), Term::literal("x")}));
}

TEST_CASE("base resolution and blank labels") {
  auto g = rdf::parse_turtle("<a> <p> _:x . _:x <p> _:y . _:x <q> <#frag> .", std::string("http://base/doc"));
  CHECK(g.size() == 3);
  auto first = g.match(Term::iri("http://base/a"), std::nullopt, std::nullopt);
  REQUIRE(first.size() == 1);
  CHECK(first[0].object == Term::blank("b0"));
  CHECK(g.contains({Term::blank("b0"), Term::iri("http://base/q"), Term::iri("http://base/doc#frag")}));
  CHECK(g.contains({Term::blank("b0"), Term::iri("http://base/p"), Term::blank("b1")}));
}

TEST_CASE("two parse sessions into one graph keep blank nodes apart") {
  Graph g = Graph::with_default_prefixes();
  rdf::parse_turtle_into(g, "_:x <http://e/p> <http://e/o> .");
  rdf::parse_turtle_into(g, "_:x <http://e/p> <http://e/o> .");
  CHECK(g.size() == 2);
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("collection") {
    try {
      rdf::parse_turtle("@prefix ex: <http://e/>.\nex:s ex:p (1 2) .");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 11);
      CHECK(e.message().find("collections") != std::string::npos);
    }
  }
  SUBCASE("property list") { CHECK_THROWS_AS(rdf::parse_turtle("<http://e/s> <http://e/p> [ <http://e/q> 1 ] ."), ParseError); }
  SUBCASE("quoted triple") { CHECK_THROWS_AS(rdf::parse_turtle("<< <http://e/s> <http://e/p> 1 >> <http://e/p> 1 ."), ParseError); }
  SUBCASE("undeclared prefix") { CHECK_THROWS_AS(rdf::parse_turtle("zz:s zz:p zz:o ."), ParseError); }
  SUBCASE("missing dot") { CHECK_THROWS_AS(rdf::parse_turtle("<http://e/s> <http://e/p> <http://e/o>"), ParseError); }
  SUBCASE("literal subject") { CHECK_THROWS_AS(rdf::parse_turtle("\"x\" <http://e/p> <http://e/o> ."), ParseError); }
  SUBCASE("relative iri") { CHECK_THROWS_AS(rdf::parse_turtle("<s> <p> <o> ."), ParseError); }
  SUBCASE("unterminated string") { CHECK_THROWS_AS(rdf::parse_turtle("<http://e/s> <http://e/p> \"abc ."), ParseError); }
}

TEST_CASE("serialization") {
  SUBCASE("empty graph has only prefix declarations") {
    auto text = rdf::serialize_turtle(Graph::with_default_prefixes());
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) CHECK(line.rfind("@prefix", 0) == 0);
    CHECK(rdf::parse_turtle(text).empty());
  }
  SUBCASE("single triple round trip") {
    auto g = rdf::parse_turtle("@prefix ex: <http://e/>. ex:s ex:p ex:o.");
    CHECK(rdf::parse_turtle(rdf::serialize_turtle(g)) == g);
  }
  SUBCASE("level-end listing round trip keeps the SPARQL text") {
    auto g = rdf::parse_turtle(read_file("data/level_end_listing.ttl"));
    auto text = rdf::serialize_turtle(g);
    CHECK(text.find("\\n") != std::string::npos);
    CHECK(rdf::parse_turtle(text) == g);
  }
}

namespace {

Term random_term(std::mt19937& rng, bool allow_literal) {
  std::uniform_int_distribution<int> kind(0, allow_literal ? 5 : 3);
  std::uniform_int_distribution<int> pick(0, 4);
  switch (kind(rng)) {
    case 0:
    case 1:
    case 2: return ex("n" + std::to_string(pick(rng)));
    case 3: return Term::blank("b" + std::to_string(pick(rng)));
    case 4: return Term::integer(pick(rng));
    default: return Term::literal("s\"" + std::to_string(pick(rng)) + "\n\\");
  }
}

Graph random_graph(std::mt19937& rng, std::size_t n) {
  Graph g = Graph::with_default_prefixes();
  g.prefixes()["ex"] = "http://e/";
  std::uniform_int_distribution<int> pred(0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    g.insert({random_term(rng, false), ex("p" + std::to_string(pred(rng))), random_term(rng, true)});
  }
  return g;
}

}  // namespace

TEST_CASE("property: serialize then parse is identity up to blank renaming") {
  std::mt19937 rng(7);
  for (int round = 0; round < 60; ++round) {
    Graph g = random_graph(rng, 1 + round % 25);
    Graph back = rdf::parse_turtle(rdf::serialize_turtle(g));
    CHECK(spn::testing::isomorphic(g, back));
  }
}

TEST_CASE("property: indexed match agrees with a linear scan") {
  std::mt19937 rng(11);
  for (int round = 0; round < 40; ++round) {
    Graph g = random_graph(rng, 40);
    auto all = g.triples();
    std::bernoulli_distribution coin(0.5);
    for (int q = 0; q < 30; ++q) {
      const Triple& probe = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
      std::optional<Term> s, p, o;
      if (coin(rng)) s = coin(rng) ? probe.subject : random_term(rng, false);
      if (coin(rng)) p = probe.predicate;
      if (coin(rng)) o = coin(rng) ? probe.object : random_term(rng, true);
      std::vector<Triple> expected;
      for (const auto& t : all) {
        if ((!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o)) expected.push_back(t);
      }
      CHECK(g.match(s, p, o) == expected);
    }
  }
}

TEST_CASE("match on typed places") {
  auto g = rdf::parse_turtle(R"(
    proj:p1 a spn:Place . proj:p2 a spn:Place . proj:t a spn:Transition .
    proj:p1 ldp:contains proj:tok .)");
  auto places = g.match(std::nullopt, Term::iri(ns::rdf_("type")), Term::iri(ns::spn_("Place")));
  CHECK(places.size() == 2);
  CHECK(Graph{}.match(std::nullopt, std::nullopt, std::nullopt).empty());
  Triple present{Term::iri(ns::proj + std::string("p1")), Term::iri(ns::ldp_("contains")),
                 Term::iri(ns::proj + std::string("tok"))};
  CHECK(g.match(present.subject, present.predicate, present.object) == std::vector<Triple>{present});
}

TEST_CASE("insert and remove report changes") {
  Graph g;
  Triple t{ex("s"), ex("p"), ex("o")};
  CHECK(g.insert(t));
  CHECK_FALSE(g.insert(t));
  CHECK(g.size() == 1);
  CHECK(g.remove(t));
  CHECK_FALSE(g.remove(t));
  CHECK(g.empty());
  CHECK_FALSE(g.remove({ex("never"), ex("p"), ex("o")}));
}

TEST_CASE("term equality is structural") {
  CHECK(Term::literal("1") != Term::integer(1));
  CHECK(Term::typed("x", ns::xsd_("string")) == Term::literal("x"));
  CHECK(Term::lang_literal("x", "en") != Term::literal("x"));
  CHECK(Term::iri("x") != Term::blank("x"));
  CHECK(Term::typed("01", ns::xsd_("integer")) != Term::integer(1));
}
