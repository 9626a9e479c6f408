#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

namespace spn::testing {

// Small random nets: <= 5 places, <= 4 transitions, <= 4 tokens, guards from
// a brute-forceable template set, expression-free arcs.
class RandomNetGenerator {
 public:
  explicit RandomNetGenerator(unsigned seed) : rng_(seed) {}

  std::string next() {
    std::size_t places = 2 + pick(4);
    std::size_t transitions = 1 + pick(4);
    std::size_t tokens = 1 + pick(4);
    std::string out;
    for (std::size_t t = 0; t < tokens; ++t) {
      out += "proj:k" + std::to_string(t) + " a proj:Item ; proj:rank " + std::to_string(pick(3)) +
             " ; proj:kind " + (pick(2) ? "proj:red" : "proj:blue") + " .\n";
    }
    std::vector<std::set<std::size_t>> held(places);
    for (std::size_t t = 0; t < tokens; ++t) held[pick(places)].insert(t);
    for (std::size_t p = 0; p < places; ++p) {
      out += place(p) + " a spn:Place";
      for (std::size_t t : held[p]) out += " ; ldp:contains proj:k" + std::to_string(t);
      out += " .\n";
    }
    for (std::size_t t = 0; t < transitions; ++t) {
      std::string tr = "proj:T" + std::to_string(t);
      bool two = pick(4) == 0;
      std::vector<std::string> args = two ? std::vector<std::string>{"?x", "?y"} : std::vector<std::string>{"?x"};
      out += tr + " a spn:Transition";
      for (const auto& a : args) out += " ; spn:hasArg \"" + a + "\"";
      std::string guard = guard_text(places);
      if (!guard.empty()) out += " ; spn:guardRule " + tr + "_g";
      out += " .\n";
      if (!guard.empty()) out += guard_nodes(tr + "_g", guard);
      std::size_t arc = 0;
      for (const auto& a : args) {
        out += arc_text(tr, arc++, "ArcP2T", place(pick(places)), a);
        std::size_t outs = pick(3);
        for (std::size_t o = 0; o < outs; ++o) out += arc_text(tr, arc++, "ArcT2P", place(pick(places)), a);
      }
    }
    return out;
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  static std::string place(std::size_t p) { return "proj:P" + std::to_string(p); }

  static std::string arc_text(const std::string& tr, std::size_t i, const char* cls, const std::string& place,
                              const std::string& arg) {
    return tr + "_a" + std::to_string(i) + " a spn:" + cls + " ; spn:relPlace " + place +
           " ; spn:relTransition " + tr + " ; spn:hasArg \"" + arg + "\" .\n";
  }

  // Guard encoded as "NOT|<ask>" or "<ask>"; empty means no guard.
  std::string guard_text(std::size_t places) {
    switch (pick(6)) {
      case 0: return "ASK { ?x proj:kind proj:red }";
      case 1: return "ASK { " + place(pick(places)) + " ldp:contains ?y }";
      case 2: return "NOT|ASK { " + place(pick(places)) + " ldp:contains ?z }";
      case 3: return "ASK { ?x proj:rank ?r . FILTER (?r > 0) }";
      default: return "";
    }
  }

  static std::string guard_nodes(const std::string& node, const std::string& guard) {
    if (guard.rfind("NOT|", 0) == 0) {
      return node + " a spn:CompoundRule ; spn:operator \"NOT\" ; spn:subRule " + node + "_s .\n" + node +
             "_s a spn:SPARQLRule ; spn:hasSPARQL \"" + guard.substr(4) + "\" .\n";
    }
    return node + " a spn:SPARQLRule ; spn:hasSPARQL \"" + guard + "\" .\n";
  }

  std::mt19937 rng_;
};

}  // namespace spn::testing
