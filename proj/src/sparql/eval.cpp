#include <algorithm>
#include <set>
#include <unordered_map>

#include "spn/error.hpp"
#include "spn/sparql/query.hpp"

namespace spn::sparql {

using rdf::Graph;
using rdf::IdPattern;
using rdf::IdTriple;
using rdf::Term;
using rdf::TermId;

Truth compare_terms(const Term& a, const Term& b, CompareOp op) {
  auto decide = [op](int c) {
    switch (op) {
      case CompareOp::Eq: return c == 0;
      case CompareOp::Ne: return c != 0;
      case CompareOp::Lt: return c < 0;
      case CompareOp::Le: return c <= 0;
      case CompareOp::Gt: return c > 0;
      case CompareOp::Ge: return c >= 0;
    }
    return false;
  };
  auto truth = [](bool v) { return v ? Truth::True : Truth::False; };

  if (a.is_numeric() && b.is_numeric()) {
    auto x = a.as_number();
    auto y = b.as_number();
    if (!x || !y) return Truth::Error;
    return truth(decide(*x < *y ? -1 : (*x > *y ? 1 : 0)));
  }
  if (a.is_literal() && b.is_literal()) {
    if (a.datatype() != b.datatype() || a.language() != b.language()) return Truth::Error;
    int c = a.value().compare(b.value());
    return truth(decide(c < 0 ? -1 : (c > 0 ? 1 : 0)));
  }
  if (!a.is_literal() && !b.is_literal()) {
    if (op == CompareOp::Eq) return truth(a == b);
    if (op == CompareOp::Ne) return truth(a != b);
    return Truth::Error;
  }
  return Truth::Error;
}

namespace {

constexpr TermId kNoTerm = UINT32_MAX;

// Pattern slot after compilation: a constant id, a variable slot, or a
// constant absent from the graph (which can never match).
struct Slot {
  enum Kind { Const, Var, Missing } kind = Const;
  TermId id = 0;
  std::size_t var = 0;
};

struct CompiledPattern {
  Slot s;
  Slot p;
  Slot o;
  std::vector<TermId> path;  // non-empty for sequence paths
};

struct CompiledFilter {
  const FilterExpr* expr;
  std::vector<std::size_t> vars;
};

class Evaluator {
 public:
  Evaluator(const Query& q, const Graph& g) : query_(q), graph_(g) {}

  QueryResult run(const Solution& pre_bound) {
    QueryResult result;
    result.form = query_.form;
    result.variables = query_.projected;

    compile();
    for (const auto& f : query_.pattern.filters) check_filter_bound(f);

    if (impossible_) return finish(result, pre_bound);
    order_patterns();
    bindings_.assign(var_names_.size(), kNoTerm);
    search(0);
    return finish(result, pre_bound);
  }

 private:
  std::size_t var_slot(const std::string& name) {
    auto it = var_index_.find(name);
    if (it != var_index_.end()) return it->second;
    var_index_.emplace(name, var_names_.size());
    var_names_.push_back(name);
    return var_names_.size() - 1;
  }

  Slot compile_term(const PatternTerm& t) {
    if (auto* v = std::get_if<Variable>(&t)) return {Slot::Var, 0, var_slot(v->name)};
    auto id = graph_.lookup(std::get<Term>(t));
    if (!id) {
      impossible_ = true;
      return {Slot::Missing, 0, 0};
    }
    return {Slot::Const, *id, 0};
  }

  void compile() {
    for (const auto& tp : query_.pattern.triples) {
      CompiledPattern cp;
      cp.s = compile_term(tp.subject);
      cp.o = compile_term(tp.object);
      if (auto* path = std::get_if<Path>(&tp.predicate)) {
        for (const auto& step : path->steps) {
          auto id = graph_.lookup(step);
          if (!id) {
            impossible_ = true;
            break;
          }
          cp.path.push_back(*id);
        }
      } else if (auto* v = std::get_if<Variable>(&tp.predicate)) {
        cp.p = {Slot::Var, 0, var_slot(v->name)};
      } else {
        cp.p = compile_term(std::get<Term>(tp.predicate));
      }
      patterns_.push_back(std::move(cp));
    }
  }

  void check_filter_bound(const FilterExpr& e) {
    if (e.kind == FilterKind::Operand) {
      if (auto* v = std::get_if<Variable>(&e.operand)) {
        if (!var_index_.count(v->name)) {
          throw EvalError("variable ?" + v->name + " in FILTER is not bound by any triple pattern");
        }
      }
      return;
    }
    for (const auto& a : e.args) check_filter_bound(a);
  }

  static void filter_vars(const FilterExpr& e, const std::unordered_map<std::string, std::size_t>& index,
                          std::vector<std::size_t>& out) {
    if (e.kind == FilterKind::Operand) {
      if (auto* v = std::get_if<Variable>(&e.operand)) out.push_back(index.at(v->name));
      return;
    }
    for (const auto& a : e.args) filter_vars(a, index, out);
  }

  // Greedy join order: most bound positions first, then fewest matches for
  // the constant part. Filters are attached at the first depth where all
  // their variables are bound.
  void order_patterns() {
    std::vector<bool> bound(var_names_.size(), false);
    std::vector<bool> used(patterns_.size(), false);
    auto score = [&](const CompiledPattern& cp) {
      auto is_bound = [&](const Slot& s) { return s.kind != Slot::Var || bound[s.var]; };
      int n = is_bound(cp.s) + is_bound(cp.o) + (cp.path.empty() ? is_bound(cp.p) : 1);
      // subject-bound paths expand forward cheaply
      if (!cp.path.empty() && is_bound(cp.s)) n += 1;
      return n;
    };
    auto estimate = [&](const CompiledPattern& cp) {
      IdPattern q;
      if (cp.s.kind == Slot::Const) q.s = cp.s.id;
      if (cp.o.kind == Slot::Const) q.o = cp.o.id;
      if (!cp.path.empty()) {
        q.p = cp.path.front();
      } else if (cp.p.kind == Slot::Const) {
        q.p = cp.p.id;
      }
      return graph_.count(q);
    };
    for (std::size_t step = 0; step < patterns_.size(); ++step) {
      std::size_t best = patterns_.size();
      int best_score = -1;
      std::size_t best_estimate = 0;
      for (std::size_t i = 0; i < patterns_.size(); ++i) {
        if (used[i]) continue;
        int s = score(patterns_[i]);
        if (s < best_score) continue;
        std::size_t e = estimate(patterns_[i]);
        if (s > best_score || e < best_estimate) {
          best = i;
          best_score = s;
          best_estimate = e;
        }
      }
      used[best] = true;
      order_.push_back(best);
      const auto& cp = patterns_[best];
      for (const Slot* s : {&cp.s, &cp.p, &cp.o}) {
        if (s->kind == Slot::Var && (s != &cp.p || cp.path.empty())) bound[s->var] = true;
      }
    }

    filters_at_.assign(patterns_.size() + 1, {});
    std::vector<std::size_t> bound_at(var_names_.size(), 0);
    for (std::size_t depth = 0; depth < order_.size(); ++depth) {
      const auto& cp = patterns_[order_[depth]];
      for (const Slot* s : {&cp.s, &cp.p, &cp.o}) {
        if (s->kind == Slot::Var && (s != &cp.p || cp.path.empty()) && bound_at[s->var] == 0) {
          bound_at[s->var] = depth + 1;
        }
      }
    }
    for (const auto& f : query_.pattern.filters) {
      CompiledFilter cf{&f, {}};
      filter_vars(f, var_index_, cf.vars);
      std::size_t depth = 0;
      for (auto v : cf.vars) depth = std::max(depth, bound_at[v]);
      filters_at_[depth].push_back(std::move(cf));
    }
  }

  Truth eval_filter(const FilterExpr& e) const {
    switch (e.kind) {
      case FilterKind::Operand: {
        const Term& t = operand(e);
        if (auto b = t.as_boolean()) return *b ? Truth::True : Truth::False;
        return Truth::Error;
      }
      case FilterKind::Compare:
        return compare_terms(operand(e.args[0]), operand(e.args[1]), e.op);
      case FilterKind::Not: {
        Truth t = eval_filter(e.args[0]);
        if (t == Truth::Error) return t;
        return t == Truth::True ? Truth::False : Truth::True;
      }
      case FilterKind::And: {
        Truth a = eval_filter(e.args[0]);
        Truth b = eval_filter(e.args[1]);
        if (a == Truth::False || b == Truth::False) return Truth::False;
        if (a == Truth::Error || b == Truth::Error) return Truth::Error;
        return Truth::True;
      }
      case FilterKind::Or: {
        Truth a = eval_filter(e.args[0]);
        Truth b = eval_filter(e.args[1]);
        if (a == Truth::True || b == Truth::True) return Truth::True;
        if (a == Truth::Error || b == Truth::Error) return Truth::Error;
        return Truth::False;
      }
    }
    return Truth::Error;
  }

  const Term& operand(const FilterExpr& e) const {
    if (e.kind != FilterKind::Operand) throw EvalError("comparison operand must be a term or variable");
    if (auto* v = std::get_if<Variable>(&e.operand)) return graph_.term(bindings_[var_index_.at(v->name)]);
    return std::get<Term>(e.operand);
  }

  bool filters_pass(std::size_t depth) const {
    for (const auto& f : filters_at_[depth]) {
      if (eval_filter(*f.expr) != Truth::True) return false;
    }
    return true;
  }

  // Assigns `value` to slot `s`; returns false on conflict. Records newly
  // bound variables in `fresh` so they can be undone.
  bool assign(const Slot& s, TermId value, std::vector<std::size_t>& fresh) {
    if (s.kind != Slot::Var) return s.id == value;
    TermId& b = bindings_[s.var];
    if (b == kNoTerm) {
      b = value;
      fresh.push_back(s.var);
      return true;
    }
    return b == value;
  }

  std::optional<TermId> value_of(const Slot& s) const {
    if (s.kind == Slot::Const) return s.id;
    if (bindings_[s.var] != kNoTerm) return bindings_[s.var];
    return std::nullopt;
  }

  std::set<TermId> follow(TermId start, const std::vector<TermId>& path, bool forward) const {
    std::set<TermId> frontier{start};
    auto step = [&](TermId pred, std::set<TermId>& next) {
      for (TermId node : frontier) {
        IdPattern q;
        q.p = pred;
        (forward ? q.s : q.o) = node;
        graph_.for_each(q, [&](const IdTriple& t) {
          next.insert(forward ? t[2] : t[0]);
          return true;
        });
      }
    };
    if (forward) {
      for (TermId pred : path) {
        std::set<TermId> next;
        step(pred, next);
        frontier.swap(next);
        if (frontier.empty()) break;
      }
    } else {
      for (auto it = path.rbegin(); it != path.rend(); ++it) {
        std::set<TermId> next;
        step(*it, next);
        frontier.swap(next);
        if (frontier.empty()) break;
      }
    }
    return frontier;
  }

  void search(std::size_t depth) {
    if (done_) return;
    if (!filters_pass(depth)) return;
    if (depth == order_.size()) {
      emit();
      return;
    }
    const CompiledPattern& cp = patterns_[order_[depth]];
    std::vector<std::size_t> fresh;
    auto undo = [&]() {
      for (auto v : fresh) bindings_[v] = kNoTerm;
      fresh.clear();
    };

    if (!cp.path.empty()) {
      auto s = value_of(cp.s);
      auto o = value_of(cp.o);
      std::vector<std::pair<TermId, TermId>> pairs;
      if (s) {
        for (TermId end : follow(*s, cp.path, true)) {
          if (!o || end == *o) pairs.emplace_back(*s, end);
        }
      } else if (o) {
        for (TermId start : follow(*o, cp.path, false)) pairs.emplace_back(start, *o);
      } else {
        std::set<TermId> starts;
        IdPattern q;
        q.p = cp.path.front();
        graph_.for_each(q, [&](const IdTriple& t) {
          starts.insert(t[0]);
          return true;
        });
        for (TermId start : starts) {
          for (TermId end : follow(start, cp.path, true)) pairs.emplace_back(start, end);
        }
      }
      for (auto [start, end] : pairs) {
        if (assign(cp.s, start, fresh) && assign(cp.o, end, fresh)) search(depth + 1);
        undo();
        if (done_) return;
      }
      return;
    }

    IdPattern q;
    q.s = value_of(cp.s);
    q.p = value_of(cp.p);
    q.o = value_of(cp.o);
    std::vector<IdTriple> matches;
    graph_.for_each(q, [&](const IdTriple& t) {
      matches.push_back(t);
      return true;
    });
    for (const auto& t : matches) {
      if (assign(cp.s, t[0], fresh) && assign(cp.p, t[1], fresh) && assign(cp.o, t[2], fresh)) {
        search(depth + 1);
      }
      undo();
      if (done_) return;
    }
  }

  void emit() {
    if (query_.form == QueryForm::Ask) {
      found_ = true;
      done_ = true;
      return;
    }
    std::vector<TermId> row;
    row.reserve(query_.projected.size());
    for (const auto& name : query_.projected) {
      auto it = var_index_.find(name);
      row.push_back(it == var_index_.end() ? kNoTerm : bindings_[it->second]);
    }
    rows_.insert(std::move(row));
  }

  QueryResult finish(QueryResult& result, const Solution& pre_bound) {
    if (query_.form == QueryForm::Ask) {
      result.boolean = found_;
      return result;
    }
    std::vector<std::size_t> by_name(query_.projected.size());
    for (std::size_t i = 0; i < by_name.size(); ++i) by_name[i] = i;
    std::sort(by_name.begin(), by_name.end(),
              [&](std::size_t a, std::size_t b) { return query_.projected[a] < query_.projected[b]; });

    std::vector<std::vector<Term>> materialized;
    materialized.reserve(rows_.size());
    for (const auto& row : rows_) {
      std::vector<Term> terms;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] != kNoTerm) {
          terms.push_back(graph_.term(row[i]));
        } else {
          auto it = pre_bound.find(query_.projected[i]);
          terms.push_back(it != pre_bound.end() ? it->second : Term());
        }
      }
      materialized.push_back(std::move(terms));
    }
    std::sort(materialized.begin(), materialized.end(), [&](const auto& a, const auto& b) {
      for (auto i : by_name) {
        if (auto c = a[i] <=> b[i]; c != 0) return c < 0;
      }
      return false;
    });
    materialized.erase(std::unique(materialized.begin(), materialized.end()), materialized.end());
    for (const auto& terms : materialized) {
      Solution s = pre_bound;
      for (std::size_t i = 0; i < terms.size(); ++i) s[query_.projected[i]] = terms[i];
      result.rows.push_back(std::move(s));
    }
    result.boolean = !result.rows.empty();
    return result;
  }

  const Query& query_;
  const Graph& graph_;
  std::vector<CompiledPattern> patterns_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<CompiledFilter>> filters_at_;
  std::unordered_map<std::string, std::size_t> var_index_;
  std::vector<std::string> var_names_;
  std::vector<TermId> bindings_;
  std::set<std::vector<TermId>> rows_;
  bool impossible_ = false;
  bool found_ = false;
  bool done_ = false;
};

}  // namespace

QueryResult evaluate(const Query& q, const Graph& g, const Solution& pre_bound) {
  if (pre_bound.empty()) return Evaluator(q, g).run(pre_bound);
  Query bound = substitute(q, pre_bound);
  return Evaluator(bound, g).run(pre_bound);
}

bool eval_exists_path(const Graph& g, const Term& s, const std::vector<Term>& path, const Term& o) {
  if (path.empty()) throw EvalError("path must have at least one step");
  auto sid = g.lookup(s);
  auto oid = g.lookup(o);
  if (!sid || !oid) return false;
  std::set<TermId> frontier{*sid};
  for (const auto& step : path) {
    auto pid = g.lookup(step);
    if (!pid) return false;
    std::set<TermId> next;
    for (TermId node : frontier) {
      g.for_each(IdPattern{node, *pid, std::nullopt}, [&](const IdTriple& t) {
        next.insert(t[2]);
        return true;
      });
    }
    frontier.swap(next);
    if (frontier.empty()) return false;
  }
  return frontier.count(*oid) != 0;
}

}  // namespace spn::sparql
