#pragma once

#include <map>
#include <string>

namespace spn::ns {

inline constexpr const char* rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr const char* rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr const char* xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr const char* ldp = "http://www.w3.org/ns/ldp#";
// The net vocabulary namespace. The IRI is a fixed placeholder.
inline constexpr const char* spn = "https://w3id.org/spn#";
// Reserved engine namespace: constraint annotations and runtime bookkeeping.
inline constexpr const char* spnx = "https://w3id.org/spn/engine#";
inline constexpr const char* bimsn = "https://w3id.org/bimsn#";
inline constexpr const char* proj = "https://example.org/proj#";
inline constexpr const char* ifc4 = "https://standards.buildingsmart.org/IFC/DEV/IFC4/ADD2_TC1/OWL#";

inline std::string rdf_(const char* local) { return std::string(rdf) + local; }
inline std::string xsd_(const char* local) { return std::string(xsd) + local; }
inline std::string ldp_(const char* local) { return std::string(ldp) + local; }
inline std::string spn_(const char* local) { return std::string(spn) + local; }
inline std::string spnx_(const char* local) { return std::string(spnx) + local; }
inline std::string bimsn_(const char* local) { return std::string(bimsn) + local; }
inline std::string ifc4_(const char* local) { return std::string(ifc4) + local; }

// The bundled prefix map declared by every graph created through Graph::with_default_prefixes.
inline std::map<std::string, std::string> default_prefixes() {
  return {{"rdf", rdf},   {"rdfs", rdfs},   {"xsd", xsd},   {"ldp", ldp},   {"spn", spn},
          {"spnx", spnx}, {"bimsn", bimsn}, {"proj", proj}, {"ifc4", ifc4}};
}

}  // namespace spn::ns
