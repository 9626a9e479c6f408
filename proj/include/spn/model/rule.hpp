#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spn/rdf/graph.hpp"
#include "spn/sparql/query.hpp"

namespace spn::model {

// Heap cell with value semantics, for recursive rule members.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

class Rule;

enum class LogicOp { And, Or, Xor, Not };

struct SparqlRule {
  std::string text;
  sparql::Query query;
};

struct ConstantRule {
  rdf::Term value;
};

struct CompoundRule {
  LogicOp op = LogicOp::And;
  std::vector<Rule> subrules;
};

struct ConditionRule {
  Box<Rule> if_rule;
  Box<Rule> then_rule;
  Box<Rule> else_rule;
};

// A node of a rule tree. `node` is the RDF resource the rule was read from
// (or will be written to).
class Rule {
 public:
  using Body = std::variant<SparqlRule, ConstantRule, CompoundRule, ConditionRule>;

  Rule(rdf::Term node, Body body) : node_(std::move(node)), body_(std::move(body)) {}

  const rdf::Term& node() const { return node_; }
  const Body& body() const { return body_; }

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&body_);
  }

 private:
  rdf::Term node_;
  Body body_;
};

bool operator==(const Rule& a, const Rule& b);

std::string to_string(LogicOp op);
std::optional<LogicOp> parse_logic_op(const std::string& text);

// Static result type of a rule. A boolean-typed ConstantRule can serve
// either role.
enum class ValueType { Boolean, TermSet, Either };

// Infers the result type; throws TypeError when a sub-rule's type conflicts
// with what its parent demands (e.g. a SELECT leaf under AND).
ValueType infer_type(const Rule& r);

using TermSet = std::vector<rdf::Term>;  // sorted, duplicate-free
using RuleValue = std::variant<bool, TermSet>;

enum class Demand { Any, Boolean, TermSet };

struct EvalOptions {
  // Stop AND/OR at the first decisive sub-rule. Never changes results.
  bool short_circuit = false;
  // Called once for every rule node that is evaluated.
  std::function<void(const Rule&)> trace;
  // Incremented once per SPARQL leaf evaluation.
  std::size_t* leaf_counter = nullptr;
};

// Evaluates a rule tree. `self` is bound to ?SELF; `pre_bound` supplies the
// binding arguments (names without '?').
RuleValue eval_rule(const Rule& r, const rdf::Graph& g, const sparql::Solution& pre_bound,
                    const rdf::Term& self, Demand demand = Demand::Any, const EvalOptions& options = {});

bool eval_boolean(const Rule& r, const rdf::Graph& g, const sparql::Solution& pre_bound,
                  const rdf::Term& self, const EvalOptions& options = {});
TermSet eval_terms(const Rule& r, const rdf::Graph& g, const sparql::Solution& pre_bound,
                   const rdf::Term& self, const EvalOptions& options = {});

// SPARQL leaves of a rule tree in depth-first order.
std::vector<const SparqlRule*> sparql_leaves(const Rule& r);

// True if some leaf has a triple pattern (or path step) with this predicate.
bool reads_predicate(const Rule& r, const rdf::Term& predicate);

// RDF encoding of a rule tree.
std::vector<rdf::Triple> rule_to_rdf(const Rule& r);

// Reads the rule tree rooted at `root`. Throws ValidationError on cardinality
// violations, unknown node types, cycles or shared sub-rules, and SPARQL
// syntax errors.
Rule rdf_to_rule(const rdf::Graph& g, const rdf::Term& root);

}  // namespace spn::model
