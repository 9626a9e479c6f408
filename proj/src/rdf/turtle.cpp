#include "spn/rdf/turtle.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "spn/error.hpp"
#include "spn/rdf/vocab.hpp"

namespace spn::rdf {

namespace {

bool has_scheme(std::string_view iri) {
  auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = iri[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      return false;
    }
  }
  return true;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_pn_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         static_cast<unsigned char>(c) >= 0x80;
}

class TurtleParser {
 public:
  TurtleParser(Graph& graph, std::string_view text, std::optional<std::string> base)
      : graph_(graph), text_(text), base_(std::move(base)) {}

  void parse() {
    skip_ws();
    while (!at_end()) {
      statement();
      skip_ws();
    }
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, col_, message); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }
  bool starts_with_keyword(std::string_view kw) const {
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    }
    return !is_pn_char(peek(kw.size())) && peek(kw.size()) != ':';
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      if (at_end()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "' but found '" + peek() + "'");
    }
    advance();
  }

  void statement() {
    if (starts_with("@prefix")) {
      advance_n(7);
      prefix_decl();
      expect('.');
    } else if (starts_with("@base")) {
      advance_n(5);
      skip_ws();
      base_ = resolve(read_iriref());
      expect('.');
    } else if (starts_with_keyword("PREFIX")) {
      advance_n(6);
      prefix_decl();
    } else if (starts_with_keyword("BASE")) {
      advance_n(4);
      skip_ws();
      base_ = resolve(read_iriref());
    } else {
      triples();
      expect('.');
    }
  }

  void advance_n(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) advance();
  }

  void prefix_decl() {
    skip_ws();
    std::string name;
    while (!at_end() && peek() != ':') {
      char c = peek();
      if (!is_pn_char(c) && c != '.') fail("malformed prefix name");
      name += advance();
    }
    if (at_end()) fail("expected ':' in prefix declaration");
    advance();
    skip_ws();
    graph_.prefixes()[name] = resolve(read_iriref());
  }

  void triples() {
    skip_ws();
    Term subject = read_subject();
    predicate_object_list(subject);
  }

  void predicate_object_list(const Term& subject) {
    for (;;) {
      skip_ws();
      Term predicate = read_verb();
      object_list(subject, predicate);
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        advance();
        skip_ws();
      }
      // a trailing ';' before the terminating '.' is legal
      if (peek() == '.' || at_end()) return;
    }
  }

  void object_list(const Term& subject, const Term& predicate) {
    for (;;) {
      skip_ws();
      Term object = read_object();
      graph_.insert({subject, predicate, object});
      skip_ws();
      if (peek() != ',') return;
      advance();
    }
  }

  void reject_unsupported() {
    char c = peek();
    if (c == '(') fail("collections are not supported");
    if (c == '[') fail("blank node property lists are not supported");
    if (starts_with("<<")) fail("quoted triples are not supported");
  }

  Term read_subject() {
    reject_unsupported();
    char c = peek();
    if (c == '<') return Term::iri(resolve(read_iriref()));
    if (c == '_' && peek(1) == ':') return read_blank();
    if (c == '"' || c == '\'' || c == '+' || c == '-' ||
        std::isdigit(static_cast<unsigned char>(c))) {
      fail("literals are not allowed in subject position");
    }
    return read_prefixed_or_keyword(false);
  }

  Term read_verb() {
    if (peek() == 'a' && !is_pn_char(peek(1)) && peek(1) != ':') {
      advance();
      return Term::iri(ns::rdf_("type"));
    }
    if (peek() == '<') return Term::iri(resolve(read_iriref()));
    if (peek() == '_' && peek(1) == ':') fail("predicate must be an IRI");
    reject_unsupported();
    if (peek() == '"' || peek() == '\'') fail("predicate must be an IRI");
    return read_prefixed_or_keyword(false);
  }

  Term read_object() {
    reject_unsupported();
    char c = peek();
    if (c == '<') return Term::iri(resolve(read_iriref()));
    if (c == '_' && peek(1) == ':') return read_blank();
    if (c == '"' || c == '\'') return read_literal();
    if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      return read_number();
    }
    return read_prefixed_or_keyword(true);
  }

  std::string read_iriref() {
    if (peek() != '<') fail("expected '<'");
    advance();
    std::string out;
    for (;;) {
      if (at_end()) fail("unterminated IRI");
      char c = advance();
      if (c == '>') break;
      if (c == '\\') {
        out += read_unicode_escape();
        continue;
      }
      if (c == ' ' || c == '\n' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`' || c == '<') {
        fail(std::string("illegal character '") + c + "' in IRI");
      }
      out += c;
    }
    return out;
  }

  std::string resolve(const std::string& iri) const {
    if (has_scheme(iri)) return iri;
    if (!base_) fail("relative IRI <" + iri + "> without a base");
    if (iri.empty()) return *base_;
    if (iri[0] == '#') {
      auto hash = base_->find('#');
      return base_->substr(0, hash) + iri;
    }
    auto slash = base_->rfind('/');
    if (iri[0] == '/' || slash == std::string::npos) return *base_ + iri;
    return base_->substr(0, slash + 1) + iri;
  }

  std::string read_unicode_escape() {
    char kind = at_end() ? '\0' : advance();
    std::size_t digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (digits == 0) fail("invalid escape sequence");
    std::string hex;
    for (std::size_t i = 0; i < digits; ++i) {
      if (at_end() || !std::isxdigit(static_cast<unsigned char>(peek()))) {
        fail("invalid unicode escape");
      }
      hex += advance();
    }
    std::string out;
    append_utf8(out, std::stoul(hex, nullptr, 16));
    return out;
  }

  Term read_blank() {
    advance_n(2);
    std::string label;
    while (!at_end() && (is_pn_char(peek()) || peek() == '.')) label += advance();
    while (!label.empty() && label.back() == '.') {
      label.pop_back();
      --pos_;
      --col_;
    }
    if (label.empty()) fail("empty blank node label");
    auto it = blanks_.find(label);
    if (it == blanks_.end()) it = blanks_.emplace(label, graph_.fresh_blank_label()).first;
    return Term::blank(it->second);
  }

  Term read_prefixed_or_keyword(bool allow_boolean) {
    std::string prefix;
    while (!at_end() && is_pn_char(peek())) prefix += advance();
    if (peek() != ':') {
      if (allow_boolean && (prefix == "true" || prefix == "false")) return Term::boolean(prefix == "true");
      if (prefix.empty()) {
        if (at_end()) fail("unexpected end of input");
        fail(std::string("unexpected character '") + peek() + "'");
      }
      fail("expected prefixed name but found '" + prefix + "'");
    }
    advance();
    std::string local;
    while (!at_end()) {
      char c = peek();
      if (is_pn_char(c) || c == '.' || c == ':' || c == '%') {
        local += advance();
      } else if (c == '\\' && pos_ + 1 < text_.size()) {
        advance();
        local += advance();
      } else {
        break;
      }
    }
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      --pos_;
      --col_;
    }
    auto it = graph_.prefixes().find(prefix);
    if (it == graph_.prefixes().end()) fail("undeclared prefix '" + prefix + ":'");
    return Term::iri(it->second + local);
  }

  Term read_literal() {
    std::string lexical = read_string();
    if (peek() == '@') {
      advance();
      std::string lang;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
        lang += advance();
      }
      if (lang.empty()) fail("empty language tag");
      return Term::lang_literal(std::move(lexical), std::move(lang));
    }
    if (peek() == '^' && peek(1) == '^') {
      advance_n(2);
      std::string dt;
      if (peek() == '<') {
        dt = resolve(read_iriref());
      } else {
        dt = read_prefixed_or_keyword(false).value();
      }
      return Term::typed(std::move(lexical), std::move(dt));
    }
    return Term::literal(std::move(lexical));
  }

  // Short strings may span lines: model files embed multi-line SPARQL in
  // ordinary double quotes.
  std::string read_string() {
    char quote = advance();
    bool long_form = peek() == quote && peek(1) == quote;
    if (long_form) advance_n(2);
    std::string out;
    for (;;) {
      if (at_end()) fail("unterminated string literal");
      char c = peek();
      if (c == quote) {
        if (!long_form) {
          advance();
          return out;
        }
        if (peek(1) == quote && peek(2) == quote) {
          advance_n(3);
          // """a"""" : extra quotes belong to the content
          while (peek() == quote) {
            out += quote;
            advance();
          }
          return out;
        }
      }
      advance();
      if (c == '\\') {
        if (at_end()) fail("unterminated escape");
        char e = peek();
        switch (e) {
          case 't': out += '\t'; advance(); break;
          case 'b': out += '\b'; advance(); break;
          case 'n': out += '\n'; advance(); break;
          case 'r': out += '\r'; advance(); break;
          case 'f': out += '\f'; advance(); break;
          case '"': out += '"'; advance(); break;
          case '\'': out += '\''; advance(); break;
          case '\\': out += '\\'; advance(); break;
          case 'u':
          case 'U': out += read_unicode_escape(); break;
          default: fail(std::string("invalid escape '\\") + e + "'");
        }
        continue;
      }
      out += c;
    }
  }

  Term read_number() {
    std::string lex;
    if (peek() == '+' || peek() == '-') lex += advance();
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      lex += advance();
      digits = true;
    }
    std::string datatype = ns::xsd_("integer");
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      lex += advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) lex += advance();
      datatype = ns::xsd_("decimal");
      digits = true;
    }
    if (!digits) fail("malformed number");
    if (peek() == 'e' || peek() == 'E') {
      lex += advance();
      if (peek() == '+' || peek() == '-') lex += advance();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
      while (std::isdigit(static_cast<unsigned char>(peek()))) lex += advance();
      datatype = ns::xsd_("double");
    }
    return Term::typed(std::move(lex), std::move(datatype));
  }

  Graph& graph_;
  std::string_view text_;
  std::optional<std::string> base_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::unordered_map<std::string, std::string> blanks_;
};

bool safe_local_name(std::string_view local) {
  if (local.empty()) return true;
  if (local.front() == '-' || local.front() == '.') return false;
  for (char c : local) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

class TurtleWriter {
 public:
  explicit TurtleWriter(const PrefixMap& prefixes) : prefixes_(prefixes) {}

  std::string iri(const std::string& value) const {
    const std::pair<const std::string, std::string>* best = nullptr;
    for (const auto& entry : prefixes_) {
      const std::string& ns_iri = entry.second;
      if (ns_iri.empty() || value.size() < ns_iri.size()) continue;
      if (value.compare(0, ns_iri.size(), ns_iri) != 0) continue;
      if (!safe_local_name(std::string_view(value).substr(ns_iri.size()))) continue;
      if (!best || ns_iri.size() > best->second.size()) best = &entry;
    }
    if (best) return best->first + ":" + value.substr(best->second.size());
    return "<" + value + ">";
  }

  std::string term(const Term& t) const {
    switch (t.kind()) {
      case TermKind::Iri:
        return iri(t.value());
      case TermKind::Blank:
        return "_:" + t.value();
      case TermKind::Literal: {
        std::string out = "\"" + escape_string(t.value()) + "\"";
        if (!t.language().empty()) return out + "@" + t.language();
        if (!t.datatype().empty()) return out + "^^" + iri(t.datatype());
        return out;
      }
    }
    return {};
  }

 private:
  const PrefixMap& prefixes_;
};

}  // namespace

void parse_turtle_into(Graph& into, std::string_view text, const std::optional<std::string>& base) {
  TurtleParser(into, text, base).parse();
}

Graph parse_turtle(std::string_view text, const std::optional<std::string>& base) {
  Graph g = Graph::with_default_prefixes();
  parse_turtle_into(g, text, base);
  return g;
}

Graph load_turtle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_turtle(buffer.str());
}

std::string serialize_turtle(const Graph& g) {
  TurtleWriter writer(g.prefixes());
  std::ostringstream out;
  for (const auto& [name, iri] : g.prefixes()) {
    out << "@prefix " << name << ": <" << iri << "> .\n";
  }
  const Term rdf_type = Term::iri(ns::rdf_("type"));
  const auto triples = g.triples();
  std::size_t i = 0;
  while (i < triples.size()) {
    const Term& subject = triples[i].subject;
    out << "\n" << writer.term(subject);
    bool first_predicate = true;
    while (i < triples.size() && triples[i].subject == subject) {
      const Term& predicate = triples[i].predicate;
      out << (first_predicate ? " " : " ;\n    ");
      out << (predicate == rdf_type ? std::string("a") : writer.term(predicate)) << " ";
      first_predicate = false;
      bool first_object = true;
      while (i < triples.size() && triples[i].subject == subject &&
             triples[i].predicate == predicate) {
        if (!first_object) out << " , ";
        out << writer.term(triples[i].object);
        first_object = false;
        ++i;
      }
    }
    out << " .\n";
  }
  return out.str();
}

}  // namespace spn::rdf
