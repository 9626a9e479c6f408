#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spn/rdf/turtle.hpp"
#include "spn/rdf/vocab.hpp"

namespace spn::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline rdf::Term proj(const std::string& local) { return rdf::Term::iri(ns::proj + local); }

inline std::string level_end_listing() { return read_file("data/level_end_listing.ttl"); }

// The listing plus one level place feeding the transition, one level L1 with
// three structural elements e1..e3, START/ACTIVE/END structure places and an
// ARCH place. Element i starts in placement[i]; an empty name leaves it out.
inline std::string level_end_micro_model(const std::vector<std::string>& placement) {
  std::string text = level_end_listing();
  text += R"(
proj:P_Level a spn:Place ; ldp:contains proj:L1 .
proj:P_Level_Done a spn:Place .
proj:arc_in a spn:ArcP2T ; spn:relPlace proj:P_Level ; spn:relTransition proj:T_Level_End_Struct ;
  spn:hasArg "?TOKEN" .
proj:arc_out a spn:ArcT2P ; spn:relPlace proj:P_Level_Done ; spn:relTransition proj:T_Level_End_Struct ;
  spn:hasArg "?TOKEN" .
proj:L1 a ifc4:IfcBuildingStorey ; ifc4:containsElements proj:rel1 .
proj:rel1 ifc4:RelatedElements proj:e1 , proj:e2 , proj:e3 .
proj:P_ST_Start a spn:Place ; bimsn:disciplineTag "STRUCT" ; bimsn:stateTag "START" .
proj:P_ST_Active a spn:Place ; bimsn:disciplineTag "STRUCT" ; bimsn:stateTag "ACTIVE" .
proj:P_ST_End a spn:Place ; bimsn:disciplineTag "STRUCT" ; bimsn:stateTag "END" .
proj:P_AR_Active a spn:Place ; bimsn:disciplineTag "ARCH" ; bimsn:stateTag "ACTIVE" .
)";
  for (std::size_t i = 0; i < placement.size(); ++i) {
    if (!placement[i].empty()) text += "proj:" + placement[i] + " ldp:contains proj:e" + std::to_string(i + 1) + " .\n";
  }
  return text;
}

inline std::string level_end_micro_model(const std::string& element_place = "P_ST_Active") {
  return level_end_micro_model(std::vector<std::string>(3, element_place));
}

}  // namespace spn::testing
