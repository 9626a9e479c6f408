#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "spn/rdf/graph.hpp"

namespace spn::rdf {

// Parses a Turtle document into a fresh graph. The bundled prefixes are
// pre-declared; document @prefix lines add to or override them.
//
// Supported: @prefix/PREFIX, @base/BASE, prefixed names, <IRIs>, string
// literals (short and long quotes, with datatype or language tag), numeric
// and boolean literals, the `a` keyword, `;` and `,` lists, and labelled
// blank nodes. Collections, `[...]` property lists and quoted triples raise
// ParseError.
Graph parse_turtle(std::string_view text, const std::optional<std::string>& base = std::nullopt);

// Parses into an existing graph. Blank-node labels are renamed to labels
// fresh for `into`, in order of first appearance.
void parse_turtle_into(Graph& into, std::string_view text,
                       const std::optional<std::string>& base = std::nullopt);

Graph load_turtle_file(const std::string& path);

// Deterministic serialization: prefix declarations, then subjects in term
// order with predicate/object lists. Re-parses to an equal triple set.
std::string serialize_turtle(const Graph& g);

}  // namespace spn::rdf
