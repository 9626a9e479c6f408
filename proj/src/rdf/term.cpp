#include "spn/rdf/term.hpp"

#include <charconv>
#include <cstdlib>

#include "spn/rdf/vocab.hpp"

namespace spn::rdf {

namespace {

bool is_numeric_datatype(const std::string& dt) {
  static const std::string base = ns::xsd;
  if (dt.size() <= base.size() || dt.compare(0, base.size(), base) != 0) return false;
  const std::string local = dt.substr(base.size());
  return local == "integer" || local == "decimal" || local == "double" || local == "float" ||
         local == "int" || local == "long" || local == "short" || local == "byte" ||
         local == "nonNegativeInteger" || local == "positiveInteger" ||
         local == "negativeInteger" || local == "nonPositiveInteger" ||
         local == "unsignedInt" || local == "unsignedLong";
}

}  // namespace

Term Term::iri(std::string value) { return Term(TermKind::Iri, std::move(value), {}, {}); }

Term Term::blank(std::string label) { return Term(TermKind::Blank, std::move(label), {}, {}); }

Term Term::literal(std::string lexical) {
  return Term(TermKind::Literal, std::move(lexical), {}, {});
}

Term Term::typed(std::string lexical, std::string datatype) {
  if (datatype == ns::xsd_("string")) datatype.clear();
  return Term(TermKind::Literal, std::move(lexical), std::move(datatype), {});
}

Term Term::lang_literal(std::string lexical, std::string language) {
  return Term(TermKind::Literal, std::move(lexical), {}, std::move(language));
}

Term Term::integer(long long value) { return typed(std::to_string(value), ns::xsd_("integer")); }

Term Term::boolean(bool value) { return typed(value ? "true" : "false", ns::xsd_("boolean")); }

std::optional<bool> Term::as_boolean() const {
  if (!is_literal() || datatype_ != ns::xsd_("boolean")) return std::nullopt;
  if (value_ == "true" || value_ == "1") return true;
  if (value_ == "false" || value_ == "0") return false;
  return std::nullopt;
}

bool Term::is_numeric() const { return is_literal() && is_numeric_datatype(datatype_); }

std::optional<double> Term::as_number() const {
  if (!is_numeric() || value_.empty()) return std::nullopt;
  const char* begin = value_.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + value_.size()) return std::nullopt;
  return v;
}

std::string Term::to_ntriples() const {
  switch (kind_) {
    case TermKind::Iri:
      return "<" + value_ + ">";
    case TermKind::Blank:
      return "_:" + value_;
    case TermKind::Literal: {
      std::string out = "\"" + escape_string(value_) + "\"";
      if (!language_.empty()) return out + "@" + language_;
      if (!datatype_.empty()) return out + "^^<" + datatype_ + ">";
      return out;
    }
  }
  return {};
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (auto c = a.value_.compare(b.value_); c != 0) return c <=> 0;
  if (auto c = a.datatype_.compare(b.datatype_); c != 0) return c <=> 0;
  return a.language_.compare(b.language_) <=> 0;
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
  std::size_t h = std::hash<std::string>{}(t.value());
  h ^= std::hash<std::string>{}(t.datatype()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<std::string>{}(t.language()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 31 + static_cast<std::size_t>(t.kind());
}

std::string escape_string(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace spn::rdf
