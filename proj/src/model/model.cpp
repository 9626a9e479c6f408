#include "spn/model/model.hpp"

#include <algorithm>
#include <regex>

#include "spn/error.hpp"
#include "spn/rdf/vocab.hpp"

namespace spn::model {

using rdf::Graph;
using rdf::Term;
using rdf::Triple;

namespace {

Term spn_term(const char* local) { return Term::iri(ns::spn_(local)); }
Term rdf_type() { return Term::iri(ns::rdf_("type")); }
Term ldp_contains() { return Term::iri(ns::ldp_("contains")); }

bool is_net_class(const Term& t) {
  static const std::set<std::string> classes = {ns::spn_("Place"), ns::spn_("Transition"), ns::spn_("Arc"),
                                                ns::spn_("ArcP2T"), ns::spn_("ArcT2P")};
  return t.is_iri() && classes.count(t.value());
}

bool is_structure_predicate(const Term& p) {
  static const std::set<std::string> preds = {
      ns::spn_("colorRule"), ns::spn_("initRule"),      ns::spn_("guardRule"), ns::spn_("hasArg"),
      ns::spn_("relPlace"),  ns::spn_("relTransition"), ns::spn_("arcExpr"),   ns::ldp_("contains")};
  return preds.count(p.value()) != 0;
}

Annotations read_annotations(const Graph& g, const Term& node) {
  Annotations out;
  for (const auto& t : g.match(node, std::nullopt, std::nullopt)) {
    if (is_structure_predicate(t.predicate) || is_bookkeeping(t.predicate)) continue;
    if (t.predicate == rdf_type() && is_net_class(t.object)) continue;
    out[t.predicate].push_back(t.object);
  }
  return out;
}

bool valid_arg_name(const std::string& name) {
  static const std::regex re("^\\?[A-Za-z_][A-Za-z0-9_]*$");
  return std::regex_match(name, re);
}

class Loader {
 public:
  explicit Loader(Graph g) { model_.graph = std::move(g); }

  SpnModel run() {
    const Graph& g = model_.graph;
    auto places = g.subjects(rdf_type(), spn_term("Place"));
    auto transitions = g.subjects(rdf_type(), spn_term("Transition"));
    std::set<Term> arcs;
    for (const char* cls : {"Arc", "ArcP2T", "ArcT2P"}) {
      for (const auto& a : g.subjects(rdf_type(), spn_term(cls))) arcs.insert(a);
    }
    if (places.empty() && transitions.empty() && arcs.empty()) {
      throw ValidationError(std::vector<Diagnostic>{{"<graph>", "no SPN nodes found"}});
    }

    std::set<Term> transition_set(transitions.begin(), transitions.end());
    for (const auto& p : places) {
      if (transition_set.count(p)) report(p, "node is both a spn:Place and a spn:Transition");
    }
    for (const auto& p : places) read_place(p);
    for (const auto& t : transitions) read_transition(t);
    for (const auto& a : arcs) read_arc(a);
    if (!diagnostics_.empty()) throw ValidationError(diagnostics_);

    check_sources();
    if (!diagnostics_.empty()) throw ValidationError(diagnostics_);

    check_types();
    return std::move(model_);
  }

 private:
  void report(const Term& node, std::string message) {
    diagnostics_.push_back({node.to_ntriples(), std::move(message)});
  }

  std::optional<Rule> optional_rule(const Term& owner, const char* predicate, const char* cls) {
    auto roots = model_.graph.objects(owner, spn_term(predicate));
    if (roots.size() > 1) {
      report(owner, std::string(cls) + ": spn:" + predicate + " 0:1 violated (found " +
                        std::to_string(roots.size()) + ")");
      return std::nullopt;
    }
    if (roots.empty()) return std::nullopt;
    try {
      return rdf_to_rule(model_.graph, roots.front());
    } catch (const ValidationError& e) {
      for (const auto& d : e.diagnostics()) diagnostics_.push_back(d);
    }
    return std::nullopt;
  }

  std::vector<ArgDef> read_args(const Term& owner, const char* cls) {
    std::vector<ArgDef> args;
    auto values = model_.graph.objects(owner, spn_term("hasArg"));
    if (values.empty()) report(owner, std::string(cls) + ": spn:hasArg 1:? violated (found 0)");
    for (const auto& v : values) {
      ArgDef def;
      if (v.is_literal()) {
        def.name = v.value();
      } else {
        auto names = model_.graph.objects(v, spn_term("argName"));
        if (names.size() != 1 || !names.front().is_literal()) {
          report(v, "spn:ArgDef: spn:argName 1:1 violated (found " + std::to_string(names.size()) + ")");
          continue;
        }
        def.name = names.front().value();
        def.allowed_types = model_.graph.objects(v, spn_term("argType"));
        std::sort(def.allowed_types.begin(), def.allowed_types.end());
      }
      if (!valid_arg_name(def.name)) {
        report(owner, "argument name '" + def.name + "' is not a SPARQL variable");
        continue;
      }
      if (def.name == "?SELF") {
        report(owner, "?SELF is reserved and cannot be an argument");
        continue;
      }
      args.push_back(std::move(def));
    }
    std::sort(args.begin(), args.end(), [](const ArgDef& a, const ArgDef& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i].name == args[i - 1].name) report(owner, "argument " + args[i].name + " declared twice");
    }
    return args;
  }

  void read_place(const Term& p) {
    PlaceDef def;
    def.iri = p;
    def.color_rule = optional_rule(p, "colorRule", "spn:Place");
    def.init_rule = optional_rule(p, "initRule", "spn:Place");
    def.annotations = read_annotations(model_.graph, p);
    model_.places.emplace(p, std::move(def));
  }

  void read_transition(const Term& t) {
    TransitionDef def;
    def.iri = t;
    def.guard = optional_rule(t, "guardRule", "spn:Transition");
    def.args = read_args(t, "spn:Transition");
    def.annotations = read_annotations(model_.graph, t);
    model_.transitions.emplace(t, std::move(def));
  }

  std::optional<Term> exactly_one(const Term& node, const char* predicate) {
    auto v = model_.graph.objects(node, spn_term(predicate));
    if (v.size() != 1) {
      report(node, std::string("spn:Arc: spn:") + predicate + " 1:1 violated (found " + std::to_string(v.size()) +
                       ")");
      return std::nullopt;
    }
    return v.front();
  }

  void read_arc(const Term& a) {
    const Graph& g = model_.graph;
    bool p2t = g.contains({a, rdf_type(), spn_term("ArcP2T")});
    bool t2p = g.contains({a, rdf_type(), spn_term("ArcT2P")});
    if (p2t && t2p) {
      report(a, "arc is typed both spn:ArcP2T and spn:ArcT2P");
      return;
    }
    if (!p2t && !t2p) {
      report(a, "spn:Arc is abstract: type the arc spn:ArcP2T or spn:ArcT2P");
      return;
    }
    ArcDef def;
    def.iri = a;
    def.direction = p2t ? Direction::P2T : Direction::T2P;
    auto place = exactly_one(a, "relPlace");
    auto transition = exactly_one(a, "relTransition");
    def.expr = optional_rule(a, "arcExpr", "spn:Arc");
    bool has_expr = !g.objects(a, spn_term("arcExpr")).empty();
    def.args = read_args(a, "spn:Arc");
    def.annotations = read_annotations(g, a);

    if (place && !model_.places.count(*place)) {
      report(a, "relPlace " + place->to_ntriples() + " is not a spn:Place");
      place.reset();
    }
    if (transition && !model_.transitions.count(*transition)) {
      report(a, "relTransition " + transition->to_ntriples() + " is not a spn:Transition");
      transition.reset();
    }
    if (!has_expr && def.args.size() > 1) {
      report(a, "arc " + a.to_ntriples() + " has " + std::to_string(def.args.size()) + " args but no arcExpr");
    }
    if (transition) {
      const auto& td = model_.transitions.at(*transition);
      for (const auto& arg : def.args) {
        if (!td.arg(arg.name)) report(a, "arc arg " + arg.name + " not among transition args");
      }
    }
    if (place) def.place = *place;
    if (transition) def.transition = *transition;
    model_.arcs.emplace(a, std::move(def));
  }

  void check_sources() {
    for (const auto& [iri, t] : model_.transitions) {
      for (const auto& arg : t.args) {
        bool covered = false;
        for (const ArcDef* a : model_.arcs_of(iri)) {
          if (!a->has_arg(arg.name)) continue;
          if (a->direction == Direction::P2T || a->expr) covered = true;
        }
        if (!covered) {
          report(iri, "arg " + arg.name + " has no candidate source (needs a P2T arc or a T2P arc expression)");
        }
      }
    }
  }

  static void require(const std::optional<Rule>& r, bool boolean, const std::string& what) {
    if (!r) return;
    ValueType t = infer_type(*r);
    if (boolean && t == ValueType::TermSet) throw TypeError(what + " must return a boolean");
    if (!boolean && t == ValueType::Boolean) throw TypeError(what + " must return tokens");
  }

  void check_types() const {
    for (const auto& [iri, p] : model_.places) {
      require(p.color_rule, true, "color rule of " + iri.to_ntriples());
      require(p.init_rule, false, "init rule of " + iri.to_ntriples());
    }
    for (const auto& [iri, t] : model_.transitions) require(t.guard, true, "guard of " + iri.to_ntriples());
    for (const auto& [iri, a] : model_.arcs) require(a.expr, false, "arc expression of " + iri.to_ntriples());
  }

  SpnModel model_;
  std::vector<Diagnostic> diagnostics_;
};

void collect_rule_nodes(const Rule& r, std::set<Term>& out) {
  for (const auto& t : rule_to_rdf(r)) out.insert(t.subject);
}

}  // namespace

const ArgDef* TransitionDef::arg(const std::string& name) const {
  for (const auto& a : args) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool ArcDef::has_arg(const std::string& name) const {
  return std::any_of(args.begin(), args.end(), [&](const ArgDef& a) { return a.name == name; });
}

std::optional<Term> annotation(const Annotations& a, const std::string& predicate) {
  auto it = a.find(Term::iri(predicate));
  if (it == a.end() || it->second.empty()) return std::nullopt;
  return it->second.front();
}

std::vector<const ArcDef*> SpnModel::arcs_of(const Term& transition) const {
  std::vector<const ArcDef*> out;
  for (const auto& [iri, a] : arcs) {
    if (a.transition == transition) out.push_back(&a);
  }
  return out;
}

std::vector<const ArcDef*> SpnModel::inputs(const Term& transition) const {
  std::vector<const ArcDef*> out;
  for (const ArcDef* a : arcs_of(transition)) {
    if (a->direction == Direction::P2T) out.push_back(a);
  }
  return out;
}

std::vector<const ArcDef*> SpnModel::outputs(const Term& transition) const {
  std::vector<const ArcDef*> out;
  for (const ArcDef* a : arcs_of(transition)) {
    if (a->direction == Direction::T2P) out.push_back(a);
  }
  return out;
}

std::vector<const ArcDef*> SpnModel::arcs_at(const Term& place) const {
  std::vector<const ArcDef*> out;
  for (const auto& [iri, a] : arcs) {
    if (a.place == place) out.push_back(&a);
  }
  return out;
}

bool SpnModel::same_structure(const SpnModel& other) const {
  return places == other.places && transitions == other.transitions && arcs == other.arcs;
}

bool is_bookkeeping(const Term& predicate) {
  static const std::set<std::string> preds = {ns::spnx_("currentTick"), ns::spnx_("lastMoveTick"),
                                              ns::spnx_("firesInTick"), ns::spnx_("firesTick")};
  return predicate.is_iri() && preds.count(predicate.value());
}

SpnModel load_model(Graph g) { return Loader(std::move(g)).run(); }

Graph model_to_rdf(const SpnModel& m) {
  Graph out;
  out.prefixes() = m.graph.prefixes();

  std::set<Term> net_nodes;
  for (const auto& [iri, p] : m.places) {
    net_nodes.insert(iri);
    if (p.color_rule) collect_rule_nodes(*p.color_rule, net_nodes);
    if (p.init_rule) collect_rule_nodes(*p.init_rule, net_nodes);
  }
  for (const auto& [iri, t] : m.transitions) {
    net_nodes.insert(iri);
    if (t.guard) collect_rule_nodes(*t.guard, net_nodes);
  }
  for (const auto& [iri, a] : m.arcs) {
    net_nodes.insert(iri);
    if (a.expr) collect_rule_nodes(*a.expr, net_nodes);
  }
  for (const auto& t : m.graph.match(std::nullopt, spn_term("hasArg"), std::nullopt)) {
    if (net_nodes.count(t.subject) && t.object.is_resource()) net_nodes.insert(t.object);
  }

  for (const auto& t : m.graph.triples()) {
    if (is_bookkeeping(t.predicate)) continue;
    if (net_nodes.count(t.subject) && t.predicate != ldp_contains()) continue;
    out.insert(t);
  }

  auto emit_rule = [&](const Term& owner, const char* predicate, const std::optional<Rule>& r) {
    if (!r) return;
    out.insert({owner, spn_term(predicate), r->node()});
    for (const auto& t : rule_to_rdf(*r)) out.insert(t);
  };
  auto emit_annotations = [&](const Term& owner, const Annotations& a) {
    for (const auto& [p, values] : a) {
      for (const auto& v : values) out.insert({owner, p, v});
    }
  };
  auto emit_args = [&](const Term& owner, const std::vector<ArgDef>& args) {
    for (const auto& arg : args) {
      if (arg.allowed_types.empty()) {
        out.insert({owner, spn_term("hasArg"), Term::literal(arg.name)});
        continue;
      }
      Term node = Term::blank(out.fresh_blank_label());
      out.insert({owner, spn_term("hasArg"), node});
      out.insert({node, rdf_type(), spn_term("ArgDef")});
      out.insert({node, spn_term("argName"), Term::literal(arg.name)});
      for (const auto& type : arg.allowed_types) out.insert({node, spn_term("argType"), type});
    }
  };

  for (const auto& [iri, p] : m.places) {
    out.insert({iri, rdf_type(), spn_term("Place")});
    emit_rule(iri, "colorRule", p.color_rule);
    emit_rule(iri, "initRule", p.init_rule);
    emit_annotations(iri, p.annotations);
  }
  for (const auto& [iri, t] : m.transitions) {
    out.insert({iri, rdf_type(), spn_term("Transition")});
    emit_rule(iri, "guardRule", t.guard);
    emit_args(iri, t.args);
    emit_annotations(iri, t.annotations);
  }
  for (const auto& [iri, a] : m.arcs) {
    out.insert({iri, rdf_type(), spn_term(a.direction == Direction::P2T ? "ArcP2T" : "ArcT2P")});
    out.insert({iri, spn_term("relPlace"), a.place});
    out.insert({iri, spn_term("relTransition"), a.transition});
    emit_rule(iri, "arcExpr", a.expr);
    emit_args(iri, a.args);
    emit_annotations(iri, a.annotations);
  }
  return out;
}

std::vector<Diagnostic> check_cardinalities(const Graph& g) {
  struct Bound {
    const char* cls;
    const char* predicate;
    std::size_t min;
    std::size_t max;  // 0 = unbounded
  };
  static const Bound bounds[] = {
      {"Transition", "guardRule", 0, 1}, {"Transition", "hasArg", 1, 0},  {"Place", "colorRule", 0, 1},
      {"Place", "initRule", 0, 1},       {"ArcP2T", "relPlace", 1, 1},    {"ArcT2P", "relPlace", 1, 1},
      {"ArcP2T", "relTransition", 1, 1}, {"ArcT2P", "relTransition", 1, 1}, {"ArcP2T", "arcExpr", 0, 1},
      {"ArcT2P", "arcExpr", 0, 1},       {"ArcP2T", "hasArg", 1, 0},      {"ArcT2P", "hasArg", 1, 0},
      {"SPARQLRule", "hasSPARQL", 1, 1}, {"ConstantRule", "hasValue", 1, 1}, {"CompoundRule", "operator", 1, 1},
      {"CompoundRule", "subRule", 1, 0}, {"ConditionRule", "if", 1, 1},   {"ConditionRule", "then", 1, 1},
      {"ConditionRule", "else", 1, 1},   {"ArgDef", "argName", 1, 1},
  };
  std::vector<Diagnostic> out;
  for (const auto& b : bounds) {
    for (const auto& node : g.subjects(rdf_type(), spn_term(b.cls))) {
      std::size_t n = g.objects(node, spn_term(b.predicate)).size();
      if (n < b.min || (b.max && n > b.max)) {
        out.push_back({node.to_ntriples(), std::string("spn:") + b.cls + ": spn:" + b.predicate + " " +
                                               std::to_string(b.min) + ":" + (b.max ? std::to_string(b.max) : "?") +
                                               " violated (found " + std::to_string(n) + ")"});
      }
    }
  }
  return out;
}

}  // namespace spn::model
