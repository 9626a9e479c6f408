#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spn/rdf/graph.hpp"
#include "spn/rdf/term.hpp"

namespace spn::sparql {

// Name without the leading '?'.
struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<rdf::Term, Variable>;

// Sequence property path p1/p2/.../pn, n >= 2.
struct Path {
  std::vector<rdf::Term> steps;
  friend bool operator==(const Path&, const Path&) = default;
};

using PatternPredicate = std::variant<rdf::Term, Variable, Path>;

struct TriplePattern {
  PatternTerm subject;
  PatternPredicate predicate;
  PatternTerm object;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class FilterKind { Compare, And, Or, Not, Operand };

struct FilterExpr {
  FilterKind kind = FilterKind::Operand;
  CompareOp op = CompareOp::Eq;
  std::vector<FilterExpr> args;  // Compare: 2, And/Or: 2, Not: 1, Operand: 0
  PatternTerm operand;           // Operand only

  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

struct GraphPattern {
  std::vector<TriplePattern> triples;
  std::vector<FilterExpr> filters;
  friend bool operator==(const GraphPattern&, const GraphPattern&) = default;
};

enum class QueryForm { Ask, Select };

struct Query {
  QueryForm form = QueryForm::Ask;
  bool distinct = false;
  std::vector<std::string> projected;  // SELECT only, in written order
  GraphPattern pattern;

  // Variables occurring in triple patterns.
  std::set<std::string> pattern_variables() const;
  // Variables occurring anywhere, filters included.
  std::set<std::string> all_variables() const;

  friend bool operator==(const Query&, const Query&) = default;
};

using Solution = std::map<std::string, rdf::Term>;

struct QueryResult {
  QueryForm form = QueryForm::Ask;
  bool boolean = false;                // ASK result; for SELECT, !rows.empty()
  std::vector<std::string> variables;  // SELECT projection
  std::vector<Solution> rows;          // SELECT, canonical order, duplicate-free
};

// Parses the supported subset. Prefixed names are expanded with `prefixes`.
Query parse_sparql(std::string_view text, const rdf::PrefixMap& prefixes);

// Replaces every variable named in `bindings` with its term.
Query substitute(const Query& q, const Solution& bindings);

QueryResult evaluate(const Query& q, const rdf::Graph& g, const Solution& pre_bound = {});

// True iff a chain of triples links s to o through `path` in order.
bool eval_exists_path(const rdf::Graph& g, const rdf::Term& s, const std::vector<rdf::Term>& path,
                      const rdf::Term& o);

// Three-valued FILTER comparison shared by the evaluator.
enum class Truth { False, True, Error };
Truth compare_terms(const rdf::Term& a, const rdf::Term& b, CompareOp op);

std::string to_string(CompareOp op);

}  // namespace spn::sparql
