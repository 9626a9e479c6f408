#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spn/model/model.hpp"
#include "spn/runtime/engine.hpp"

namespace spn::unfold {

using rdf::Term;

// One declared mutable domain predicate.
struct MutablePredicate {
  Term predicate;
  bool editable = false;
  std::optional<Term> value_class;  // insert candidates are instances of this class
};

struct MutableDeclaration {
  std::vector<MutablePredicate> predicates;
};

// Reads `spnx:MutablePredicate` nodes (spnx:predicate, spnx:editable,
// spnx:valueClass) from a graph.
MutableDeclaration read_declaration(const rdf::Graph& g);

// Step 1. Each (subject, editable predicate) pair with at least one object
// becomes a direct-container place with insert and delete edit transitions.
// Rules reading the clock, the move bookkeeping or a non-editable mutable
// predicate raise NonInternalizableError.
model::SpnModel internalize_domain(const model::SpnModel& m, const MutableDeclaration& decl);

// Places a rule tree can read, found from its ldp:contains and
// member-relation patterns. Place variables are narrowed by evaluating the
// frozen part of the query with ?SELF fixed; unconstrained ones read every
// place of the matching kind.
std::set<Term> places_read(const model::SpnModel& m, const model::Rule& r, const Term& self);

// Places read by the guard and arc expressions of `t` and the color rules of
// its output places.
std::set<Term> places_read_by(const model::SpnModel& m, const Term& transition);

// Step 2. Adds a fetch/return arc pair (annotated spnx:readArc) for every
// place a transition reads but is not connected to.
model::SpnModel explicate_connections(const model::SpnModel& m);

// Step 3 output: a safe colored net with complement places and explicit
// binding tables.
struct CpnPlace {
  std::string name;
  Term origin;  // the model place
  bool complement = false;
  std::vector<Term> colorset;
};

// (place index, token)
using CpnToken = std::pair<std::size_t, Term>;

struct CpnRow {
  sparql::Solution binding;
  std::vector<CpnToken> pre;   // required and removed
  std::vector<CpnToken> post;  // added
};

struct CpnTransition {
  Term origin;
  std::vector<std::size_t> read_places;  // remote places reached through read arcs
  std::vector<std::size_t> observed;     // places whose contents select the row
  std::vector<CpnRow> rows;
};

struct CpnNet {
  std::vector<CpnPlace> places;
  std::vector<CpnTransition> transitions;
  std::set<CpnToken> initial;
  std::set<Term> universe;

  std::size_t place_index(const Term& origin, bool complement = false) const;
};

struct TabulateOptions {
  std::size_t vocab_bound = 30;          // on the token universe
  std::size_t max_snapshots = 2000000;   // per transition
};

CpnNet tabulate_rules(const model::SpnModel& m, const TabulateOptions& options = {});

using CpnMarking = std::set<CpnToken>;

// Sorted "place token" lines; two markings are equal iff fingerprints are.
std::string fingerprint(const CpnNet& net, const CpnMarking& marking);

struct CpnEdge {
  std::size_t from = 0;
  std::size_t transition = 0;
  std::size_t row = 0;
  std::size_t to = 0;
};

struct Reachability {
  std::vector<CpnMarking> markings;  // index 0 is the initial marking
  std::vector<CpnEdge> edges;
  bool truncated = false;
};

// Rows enabled in `marking`.
std::vector<std::pair<std::size_t, std::size_t>> enabled_rows(const CpnNet& net, const CpnMarking& marking);
CpnMarking fire_row(const CpnNet& net, const CpnMarking& marking, std::size_t transition, std::size_t row);

Reachability explore(const CpnNet& net, std::size_t bound);

// Complement places removed, keyed by model place.
runtime::Marking project(const CpnNet& net, const CpnMarking& marking);
CpnMarking embed(const CpnNet& net, const runtime::Marking& marking);

std::string net_json(const CpnNet& net);
std::string reachability_json(const CpnNet& net, const Reachability& r);

// Steps 1 to 3.
CpnNet unfold(const model::SpnModel& m, const MutableDeclaration& decl, const TabulateOptions& options = {});

}  // namespace spn::unfold
