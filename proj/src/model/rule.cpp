#include "spn/model/rule.hpp"

#include <algorithm>
#include <set>

#include "spn/error.hpp"
#include "spn/rdf/vocab.hpp"

namespace spn::model {

using rdf::Term;
using rdf::Triple;

bool operator==(const Rule& a, const Rule& b) {
  if (a.node() != b.node() || a.body().index() != b.body().index()) return false;
  if (auto* x = a.as<SparqlRule>()) return x->text == b.as<SparqlRule>()->text;
  if (auto* x = a.as<ConstantRule>()) return x->value == b.as<ConstantRule>()->value;
  if (auto* x = a.as<CompoundRule>()) {
    auto* y = b.as<CompoundRule>();
    return x->op == y->op && x->subrules == y->subrules;
  }
  auto* x = a.as<ConditionRule>();
  auto* y = b.as<ConditionRule>();
  return *x->if_rule == *y->if_rule && *x->then_rule == *y->then_rule && *x->else_rule == *y->else_rule;
}

std::string to_string(LogicOp op) {
  switch (op) {
    case LogicOp::And: return "AND";
    case LogicOp::Or: return "OR";
    case LogicOp::Xor: return "XOR";
    case LogicOp::Not: return "NOT";
  }
  return "?";
}

std::optional<LogicOp> parse_logic_op(const std::string& text) {
  if (text == "AND") return LogicOp::And;
  if (text == "OR") return LogicOp::Or;
  if (text == "XOR") return LogicOp::Xor;
  if (text == "NOT") return LogicOp::Not;
  return std::nullopt;
}

namespace {

std::string describe(const Rule& r) { return r.node().to_ntriples(); }

bool boolean_compatible(ValueType t) { return t != ValueType::TermSet; }

}  // namespace

ValueType infer_type(const Rule& r) {
  if (auto* s = r.as<SparqlRule>()) {
    return s->query.form == sparql::QueryForm::Ask ? ValueType::Boolean : ValueType::TermSet;
  }
  if (auto* c = r.as<ConstantRule>()) {
    return c->value.as_boolean() ? ValueType::Either : ValueType::TermSet;
  }
  if (auto* c = r.as<CompoundRule>()) {
    for (const auto& sub : c->subrules) {
      if (!boolean_compatible(infer_type(sub))) {
        throw TypeError("sub-rule " + describe(sub) + " of " + to_string(c->op) + " rule " + describe(r) +
                        " yields tokens, not a boolean");
      }
    }
    return ValueType::Boolean;
  }
  const auto& cond = *r.as<ConditionRule>();
  if (!boolean_compatible(infer_type(*cond.if_rule))) {
    throw TypeError("'if' rule " + describe(*cond.if_rule) + " of " + describe(r) + " must return a boolean");
  }
  ValueType a = infer_type(*cond.then_rule);
  ValueType b = infer_type(*cond.else_rule);
  if (a == ValueType::Either) return b;
  if (b == ValueType::Either || a == b) return a;
  throw TypeError("'then' and 'else' branches of " + describe(r) + " return different kinds of value");
}

namespace {

class RuleEvaluator {
 public:
  RuleEvaluator(const rdf::Graph& g, const sparql::Solution& pre_bound, const Term& self,
                const EvalOptions& options)
      : graph_(g), bindings_(pre_bound), options_(options) {
    bindings_["SELF"] = self;
  }

  RuleValue eval(const Rule& r, Demand demand) {
    if (options_.trace) options_.trace(r);
    if (auto* s = r.as<SparqlRule>()) return sparql(r, *s, demand);
    if (auto* c = r.as<ConstantRule>()) return constant(r, *c, demand);
    if (auto* c = r.as<CompoundRule>()) return compound(*c);
    const auto& cond = *r.as<ConditionRule>();
    bool test = as_bool(*cond.if_rule);
    return eval(test ? *cond.then_rule : *cond.else_rule, demand);
  }

  bool as_bool(const Rule& r) { return std::get<bool>(eval(r, Demand::Boolean)); }

 private:
  RuleValue sparql(const Rule& r, const SparqlRule& s, Demand demand) {
    if (options_.leaf_counter) ++*options_.leaf_counter;
    auto result = sparql::evaluate(s.query, graph_, bindings_);
    if (s.query.form == sparql::QueryForm::Ask) {
      if (demand == Demand::TermSet) throw TypeError("ASK rule " + describe(r) + " used where tokens are needed");
      return result.boolean;
    }
    if (demand == Demand::Boolean) throw TypeError("SELECT rule " + describe(r) + " used where a boolean is needed");
    TermSet out;
    const std::string& var = s.query.projected.front();
    for (const auto& row : result.rows) out.push_back(row.at(var));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  RuleValue constant(const Rule& r, const ConstantRule& c, Demand demand) {
    if (demand == Demand::Boolean) {
      if (auto b = c.value.as_boolean()) return *b;
      throw TypeError("constant rule " + describe(r) + " is not an xsd:boolean");
    }
    return TermSet{c.value};
  }

  RuleValue compound(const CompoundRule& c) {
    if (c.op == LogicOp::Not) return !as_bool(c.subrules.front());
    std::size_t true_count = 0;
    for (const auto& sub : c.subrules) {
      bool v = as_bool(sub);
      true_count += v;
      if (options_.short_circuit) {
        if (c.op == LogicOp::And && !v) return false;
        if (c.op == LogicOp::Or && v) return true;
      }
    }
    switch (c.op) {
      case LogicOp::And: return true_count == c.subrules.size();
      case LogicOp::Or: return true_count > 0;
      case LogicOp::Xor: return true_count % 2 == 1;
      case LogicOp::Not: break;
    }
    return false;
  }

  const rdf::Graph& graph_;
  sparql::Solution bindings_;
  const EvalOptions& options_;
};

}  // namespace

RuleValue eval_rule(const Rule& r, const rdf::Graph& g, const sparql::Solution& pre_bound, const Term& self,
                    Demand demand, const EvalOptions& options) {
  return RuleEvaluator(g, pre_bound, self, options).eval(r, demand);
}

bool eval_boolean(const Rule& r, const rdf::Graph& g, const sparql::Solution& pre_bound, const Term& self,
                  const EvalOptions& options) {
  return std::get<bool>(eval_rule(r, g, pre_bound, self, Demand::Boolean, options));
}

TermSet eval_terms(const Rule& r, const rdf::Graph& g, const sparql::Solution& pre_bound, const Term& self,
                   const EvalOptions& options) {
  return std::get<TermSet>(eval_rule(r, g, pre_bound, self, Demand::TermSet, options));
}

std::vector<const SparqlRule*> sparql_leaves(const Rule& r) {
  std::vector<const SparqlRule*> out;
  std::function<void(const Rule&)> walk = [&](const Rule& n) {
    if (auto* s = n.as<SparqlRule>()) {
      out.push_back(s);
    } else if (auto* c = n.as<CompoundRule>()) {
      for (const auto& sub : c->subrules) walk(sub);
    } else if (auto* c = n.as<ConditionRule>()) {
      walk(*c->if_rule);
      walk(*c->then_rule);
      walk(*c->else_rule);
    }
  };
  walk(r);
  return out;
}

bool reads_predicate(const Rule& r, const Term& predicate) {
  for (const SparqlRule* s : sparql_leaves(r)) {
    for (const auto& tp : s->query.pattern.triples) {
      if (auto* t = std::get_if<Term>(&tp.predicate); t && *t == predicate) return true;
      if (auto* p = std::get_if<sparql::Path>(&tp.predicate)) {
        for (const auto& step : p->steps) {
          if (step == predicate) return true;
        }
      }
    }
  }
  return false;
}

namespace {

Term spn_term(const char* local) { return Term::iri(ns::spn_(local)); }

void emit(const Rule& r, std::vector<Triple>& out) {
  const Term type = Term::iri(ns::rdf_("type"));
  if (auto* s = r.as<SparqlRule>()) {
    out.push_back({r.node(), type, spn_term("SPARQLRule")});
    out.push_back({r.node(), spn_term("hasSPARQL"), Term::literal(s->text)});
  } else if (auto* c = r.as<ConstantRule>()) {
    out.push_back({r.node(), type, spn_term("ConstantRule")});
    out.push_back({r.node(), spn_term("hasValue"), c->value});
  } else if (auto* c = r.as<CompoundRule>()) {
    out.push_back({r.node(), type, spn_term("CompoundRule")});
    out.push_back({r.node(), spn_term("operator"), Term::literal(to_string(c->op))});
    for (const auto& sub : c->subrules) {
      out.push_back({r.node(), spn_term("subRule"), sub.node()});
      emit(sub, out);
    }
  } else {
    const auto& cond = *r.as<ConditionRule>();
    out.push_back({r.node(), type, spn_term("ConditionRule")});
    out.push_back({r.node(), spn_term("if"), cond.if_rule->node()});
    out.push_back({r.node(), spn_term("then"), cond.then_rule->node()});
    out.push_back({r.node(), spn_term("else"), cond.else_rule->node()});
    emit(*cond.if_rule, out);
    emit(*cond.then_rule, out);
    emit(*cond.else_rule, out);
  }
}

class RuleReader {
 public:
  explicit RuleReader(const rdf::Graph& g) : graph_(g) {}

  Rule read(const Term& node) {
    if (on_path_.count(node)) fail(node, "rule graph has a cycle through this node");
    if (seen_.count(node)) fail(node, "rule graph is not a tree: node is a sub-rule more than once");
    on_path_.insert(node);
    seen_.insert(node);
    Rule r = read_body(node);
    on_path_.erase(node);
    return r;
  }

 private:
  [[noreturn]] static void fail(const Term& node, const std::string& message) {
    throw ValidationError({{node.to_ntriples(), message}});
  }

  std::vector<Term> values(const Term& node, const char* local) const {
    return graph_.objects(node, spn_term(local));
  }

  Term exactly_one(const Term& node, const char* local, const char* cls) const {
    auto v = values(node, local);
    if (v.size() != 1) {
      fail(node, std::string(cls) + ": spn:" + local + " 1:1 violated (found " + std::to_string(v.size()) + ")");
    }
    return v.front();
  }

  Rule read_body(const Term& node) {
    static const char* classes[] = {"SPARQLRule", "ConstantRule", "CompoundRule", "ConditionRule"};
    std::vector<std::string> found;
    for (const char* cls : classes) {
      if (graph_.contains({node, Term::iri(ns::rdf_("type")), spn_term(cls)})) found.push_back(cls);
    }
    if (found.empty()) {
      fail(node, "not a rule node: expected a spn:SPARQLRule, spn:ConstantRule, spn:CompoundRule or "
                 "spn:ConditionRule");
    }
    if (found.size() > 1) fail(node, "rule node has more than one rule class");
    const std::string& cls = found.front();

    if (cls == "SPARQLRule") {
      Term text = exactly_one(node, "hasSPARQL", "spn:SPARQLRule");
      if (!text.is_literal()) fail(node, "spn:hasSPARQL must be a string literal");
      try {
        return Rule(node, SparqlRule{text.value(), sparql::parse_sparql(text.value(), graph_.prefixes())});
      } catch (const Error& e) {
        fail(node, std::string("invalid SPARQL: ") + e.what());
      }
    }
    if (cls == "ConstantRule") return Rule(node, ConstantRule{exactly_one(node, "hasValue", "spn:ConstantRule")});
    if (cls == "CompoundRule") {
      Term op_text = exactly_one(node, "operator", "spn:CompoundRule");
      auto op = parse_logic_op(op_text.value());
      if (!op_text.is_literal() || !op) {
        fail(node, "spn:operator must be one of AND, OR, XOR, NOT (found " + op_text.to_ntriples() + ")");
      }
      auto subs = values(node, "subRule");
      if (subs.empty()) fail(node, "spn:CompoundRule: spn:subRule 1:? violated (found 0)");
      if (*op == LogicOp::Not && subs.size() != 1) {
        fail(node, "NOT rule with " + std::to_string(subs.size()) + " sub-rules (exactly 1 allowed)");
      }
      CompoundRule c{*op, {}};
      for (const auto& sub : subs) c.subrules.push_back(read(sub));
      return Rule(node, std::move(c));
    }
    Term if_node = exactly_one(node, "if", "spn:ConditionRule");
    Term then_node = exactly_one(node, "then", "spn:ConditionRule");
    Term else_node = exactly_one(node, "else", "spn:ConditionRule");
    Rule if_rule = read(if_node);
    Rule then_rule = read(then_node);
    Rule else_rule = read(else_node);
    return Rule(node, ConditionRule{std::move(if_rule), std::move(then_rule), std::move(else_rule)});
  }

  const rdf::Graph& graph_;
  std::set<Term> on_path_;
  std::set<Term> seen_;
};

}  // namespace

std::vector<Triple> rule_to_rdf(const Rule& r) {
  std::vector<Triple> out;
  emit(r, out);
  return out;
}

Rule rdf_to_rule(const rdf::Graph& g, const Term& root) { return RuleReader(g).read(root); }

}  // namespace spn::model
