#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace spn::rdf {

enum class TermKind : unsigned char { Iri = 0, Blank = 1, Literal = 2 };

// An RDF term. Simple literals carry an empty datatype; `xsd:string` is
// normalized away at construction so "x" and "x"^^xsd:string are one term.
class Term {
 public:
  Term() = default;

  static Term iri(std::string value);
  static Term blank(std::string label);
  static Term literal(std::string lexical);
  static Term typed(std::string lexical, std::string datatype);
  static Term lang_literal(std::string lexical, std::string language);
  static Term integer(long long value);
  static Term boolean(bool value);

  TermKind kind() const { return kind_; }
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }
  const std::string& language() const { return language_; }

  bool is_iri() const { return kind_ == TermKind::Iri; }
  bool is_blank() const { return kind_ == TermKind::Blank; }
  bool is_literal() const { return kind_ == TermKind::Literal; }
  bool is_resource() const { return kind_ != TermKind::Literal; }

  // True for "true"/"false" typed xsd:boolean.
  std::optional<bool> as_boolean() const;
  // Numeric value for xsd numeric literals with a valid lexical form.
  std::optional<double> as_number() const;
  bool is_numeric() const;

  // N-Triples rendering: <iri>, _:label, "lex"^^<dt>, "lex"@lang.
  std::string to_ntriples() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  Term(TermKind kind, std::string value, std::string datatype, std::string language)
      : kind_(kind),
        value_(std::move(value)),
        datatype_(std::move(datatype)),
        language_(std::move(language)) {}

  TermKind kind_ = TermKind::Iri;
  std::string value_;
  std::string datatype_;
  std::string language_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple& a, const Triple& b) {
    if (auto c = a.subject <=> b.subject; c != 0) return c;
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return a.object <=> b.object;
  }
};

// Escapes a string for use inside a double-quoted N-Triples/Turtle literal.
std::string escape_string(std::string_view raw);

}  // namespace spn::rdf
