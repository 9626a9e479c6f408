#pragma once

// Brute-force reference evaluator for the SPARQL subset: enumerates every
// assignment of the query's variables over the graph's terms and checks each
// pattern and filter directly. Shares only the AST with the real engine.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>

#include "spn/error.hpp"
#include "spn/rdf/graph.hpp"
#include "spn/sparql/query.hpp"

namespace spn::testing {

namespace oracle_detail {

using rdf::Term;
using sparql::CompareOp;
using sparql::FilterExpr;
using sparql::FilterKind;
using Assignment = std::map<std::string, Term>;

enum class V { F, T, E };

inline const Term& resolve(const sparql::PatternTerm& t, const Assignment& a) {
  if (auto* v = std::get_if<sparql::Variable>(&t)) return a.at(v->name);
  return std::get<Term>(t);
}

inline bool numeric_type(const std::string& dt) {
  static const std::set<std::string> types = {
      "http://www.w3.org/2001/XMLSchema#integer", "http://www.w3.org/2001/XMLSchema#decimal",
      "http://www.w3.org/2001/XMLSchema#double", "http://www.w3.org/2001/XMLSchema#float",
      "http://www.w3.org/2001/XMLSchema#int", "http://www.w3.org/2001/XMLSchema#long"};
  return types.count(dt) != 0;
}

inline V cmp(const Term& a, const Term& b, CompareOp op) {
  auto apply = [&](int c) -> V {
    bool r = op == CompareOp::Eq   ? c == 0
             : op == CompareOp::Ne ? c != 0
             : op == CompareOp::Lt ? c < 0
             : op == CompareOp::Le ? c <= 0
             : op == CompareOp::Gt ? c > 0
                                   : c >= 0;
    return r ? V::T : V::F;
  };
  bool an = a.is_literal() && numeric_type(a.datatype());
  bool bn = b.is_literal() && numeric_type(b.datatype());
  if (an && bn) {
    char* end_a = nullptr;
    char* end_b = nullptr;
    double x = std::strtod(a.value().c_str(), &end_a);
    double y = std::strtod(b.value().c_str(), &end_b);
    if (a.value().empty() || b.value().empty() || *end_a || *end_b) return V::E;
    return apply(x < y ? -1 : x > y ? 1 : 0);
  }
  if (a.is_literal() != b.is_literal()) return V::E;
  if (a.is_literal()) {
    if (a.datatype() != b.datatype() || a.language() != b.language()) return V::E;
    return apply(a.value() < b.value() ? -1 : a.value() > b.value() ? 1 : 0);
  }
  if (op == CompareOp::Eq) return a == b ? V::T : V::F;
  if (op == CompareOp::Ne) return a == b ? V::F : V::T;
  return V::E;
}

inline V filter(const FilterExpr& e, const Assignment& a) {
  switch (e.kind) {
    case FilterKind::Operand: {
      const Term& t = resolve(e.operand, a);
      if (t.is_literal() && t.datatype() == "http://www.w3.org/2001/XMLSchema#boolean") {
        if (t.value() == "true") return V::T;
        if (t.value() == "false") return V::F;
      }
      return V::E;
    }
    case FilterKind::Compare:
      return cmp(resolve(e.args[0].operand, a), resolve(e.args[1].operand, a), e.op);
    case FilterKind::Not: {
      V v = filter(e.args[0], a);
      return v == V::E ? V::E : (v == V::T ? V::F : V::T);
    }
    case FilterKind::And: {
      V x = filter(e.args[0], a), y = filter(e.args[1], a);
      if (x == V::F || y == V::F) return V::F;
      return (x == V::E || y == V::E) ? V::E : V::T;
    }
    case FilterKind::Or: {
      V x = filter(e.args[0], a), y = filter(e.args[1], a);
      if (x == V::T || y == V::T) return V::T;
      return (x == V::E || y == V::E) ? V::E : V::F;
    }
  }
  return V::E;
}

inline bool chain(const rdf::Graph& g, const Term& s, const std::vector<Term>& steps, std::size_t i,
                  const Term& o) {
  if (i == steps.size()) return s == o;
  for (const auto& t : g.match(s, steps[i], std::nullopt)) {
    if (chain(g, t.object, steps, i + 1, o)) return true;
  }
  return false;
}

inline bool pattern_holds(const rdf::Graph& g, const sparql::TriplePattern& tp, const Assignment& a) {
  const Term& s = resolve(tp.subject, a);
  const Term& o = resolve(tp.object, a);
  if (auto* path = std::get_if<sparql::Path>(&tp.predicate)) return chain(g, s, path->steps, 0, o);
  const Term& p = std::holds_alternative<sparql::Variable>(tp.predicate)
                      ? a.at(std::get<sparql::Variable>(tp.predicate).name)
                      : std::get<Term>(tp.predicate);
  return g.contains({s, p, o});
}

inline void filter_vars(const FilterExpr& e, std::set<std::string>& out) {
  if (e.kind == FilterKind::Operand) {
    if (auto* v = std::get_if<sparql::Variable>(&e.operand)) out.insert(v->name);
  }
  for (const auto& x : e.args) filter_vars(x, out);
}

}  // namespace oracle_detail

inline sparql::QueryResult brute_force_evaluate(const sparql::Query& q, const rdf::Graph& g,
                                                const sparql::Solution& pre_bound = {}) {
  using namespace oracle_detail;
  sparql::QueryResult result;
  result.form = q.form;
  result.variables = q.projected;

  std::set<std::string> pattern_vars;
  for (const auto& tp : q.pattern.triples) {
    for (const sparql::PatternTerm* t : {&tp.subject, &tp.object}) {
      if (auto* v = std::get_if<sparql::Variable>(t)) pattern_vars.insert(v->name);
    }
    if (auto* v = std::get_if<sparql::Variable>(&tp.predicate)) pattern_vars.insert(v->name);
  }
  std::set<std::string> fvars;
  for (const auto& f : q.pattern.filters) filter_vars(f, fvars);
  for (const auto& v : fvars) {
    if (!pattern_vars.count(v) && !pre_bound.count(v)) throw EvalError("unbound filter variable ?" + v);
  }

  std::vector<std::string> free;
  for (const auto& v : pattern_vars) {
    if (!pre_bound.count(v)) free.push_back(v);
  }
  const auto terms_set = g.terms();
  const std::vector<Term> terms(terms_set.begin(), terms_set.end());

  // Each pattern is checked as soon as its last free variable is assigned.
  std::vector<std::vector<const sparql::TriplePattern*>> due(free.size() + 1);
  for (const auto& tp : q.pattern.triples) {
    std::size_t last = 0;
    for (std::size_t i = 0; i < free.size(); ++i) {
      bool uses = false;
      for (const sparql::PatternTerm* t : {&tp.subject, &tp.object}) {
        if (auto* v = std::get_if<sparql::Variable>(t)) uses |= v->name == free[i];
      }
      if (auto* v = std::get_if<sparql::Variable>(&tp.predicate)) uses |= v->name == free[i];
      if (uses) last = i + 1;
    }
    due[last].push_back(&tp);
  }

  std::set<std::vector<Term>> rows;
  bool any = false;
  Assignment a = pre_bound;
  std::function<void(std::size_t)> enumerate = [&](std::size_t i) {
    if (any && q.form == sparql::QueryForm::Ask) return;
    for (const auto* tp : due[i]) {
      if (!pattern_holds(g, *tp, a)) return;
    }
    if (i == free.size()) {
      for (const auto& f : q.pattern.filters) {
        if (filter(f, a) != V::T) return;
      }
      any = true;
      std::vector<Term> row;
      std::vector<std::string> names = q.projected;
      std::sort(names.begin(), names.end());
      for (const auto& n : names) row.push_back(a.at(n));
      rows.insert(row);
      return;
    }
    for (const auto& t : terms) {
      a[free[i]] = t;
      enumerate(i + 1);
    }
    a.erase(free[i]);
  };
  enumerate(0);

  result.boolean = any;
  if (q.form == sparql::QueryForm::Select) {
    std::vector<std::string> names = q.projected;
    std::sort(names.begin(), names.end());
    for (const auto& row : rows) {
      sparql::Solution s = pre_bound;
      for (std::size_t i = 0; i < names.size(); ++i) s[names[i]] = row[i];
      result.rows.push_back(std::move(s));
    }
  }
  return result;
}

}  // namespace spn::testing
