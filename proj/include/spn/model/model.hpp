#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spn/error.hpp"
#include "spn/model/rule.hpp"
#include "spn/rdf/graph.hpp"

namespace spn::model {

using Annotations = std::map<rdf::Term, std::vector<rdf::Term>>;

struct ArgDef {
  std::string name;                      // with leading '?'
  std::vector<rdf::Term> allowed_types;  // sorted; empty = any
  std::string var() const { return name.substr(1); }
  friend bool operator==(const ArgDef&, const ArgDef&) = default;
};

struct PlaceDef {
  rdf::Term iri;
  std::optional<Rule> color_rule;
  std::optional<Rule> init_rule;
  Annotations annotations;
  friend bool operator==(const PlaceDef&, const PlaceDef&) = default;
};

struct TransitionDef {
  rdf::Term iri;
  std::optional<Rule> guard;
  std::vector<ArgDef> args;  // sorted by name
  Annotations annotations;

  const ArgDef* arg(const std::string& name) const;
  friend bool operator==(const TransitionDef&, const TransitionDef&) = default;
};

enum class Direction { P2T, T2P };

struct ArcDef {
  rdf::Term iri;
  Direction direction = Direction::P2T;
  rdf::Term place;
  rdf::Term transition;
  std::vector<ArgDef> args;  // sorted by name
  std::optional<Rule> expr;
  Annotations annotations;

  bool has_arg(const std::string& name) const;
  friend bool operator==(const ArcDef&, const ArcDef&) = default;
};

// First value of an annotation, if any.
std::optional<rdf::Term> annotation(const Annotations& a, const std::string& predicate);

class SpnModel {
 public:
  std::map<rdf::Term, PlaceDef> places;
  std::map<rdf::Term, TransitionDef> transitions;
  std::map<rdf::Term, ArcDef> arcs;
  rdf::Graph graph;

  // Every term occurring in the graph.
  std::set<rdf::Term> vocabulary() const { return graph.terms(); }

  // Arcs of a transition in arc-iri order.
  std::vector<const ArcDef*> arcs_of(const rdf::Term& transition) const;
  std::vector<const ArcDef*> inputs(const rdf::Term& transition) const;
  std::vector<const ArcDef*> outputs(const rdf::Term& transition) const;
  // Arcs touching a place.
  std::vector<const ArcDef*> arcs_at(const rdf::Term& place) const;

  // Structural equality on places, transitions, arcs and rules.
  bool same_structure(const SpnModel& other) const;
};

// Predicates in the engine namespace that hold runtime state rather than model.
bool is_bookkeeping(const rdf::Term& predicate);

// Extracts and validates a model. Structural problems are collected into one
// ValidationError; rule kind mismatches (a SELECT guard, an ASK arc
// expression) raise TypeError.
SpnModel load_model(rdf::Graph g);

// The model graph with net triples regenerated from the definitions and
// runtime bookkeeping removed. Domain triples and the marking are kept.
rdf::Graph model_to_rdf(const SpnModel& m);

// Re-checks node cardinalities on a serialized model.
std::vector<Diagnostic> check_cardinalities(const rdf::Graph& g);

}  // namespace spn::model
