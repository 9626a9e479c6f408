#include <cctype>

#include "spn/error.hpp"
#include "spn/rdf/vocab.hpp"
#include "spn/sparql/query.hpp"

namespace spn::sparql {

namespace {

enum class Tok {
  Var,
  IriRef,
  PName,
  String,
  Number,
  Word,  // bare keyword or `a`, true, false
  LangTag,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Dot,
  Semicolon,
  Comma,
  Slash,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  AndAnd,
  OrOr,
  Bang,
  Carets,
  End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", pos_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw QueryParseError(pos_, msg); }

  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // `<` opens an IRI only when a `>` closes it before any whitespace.
  bool looks_like_iri() const {
    for (std::size_t i = pos_ + 1; i < text_.size(); ++i) {
      char c = text_[i];
      if (c == '>') return true;
      if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"' || c == '{' ||
          c == '}') {
        return false;
      }
    }
    return false;
  }

  Token next() {
    std::size_t start = pos_;
    char c = peek();
    auto single = [&](Tok k) {
      ++pos_;
      return Token{k, std::string(1, c), start};
    };
    auto dbl = [&](Tok k) {
      pos_ += 2;
      return Token{k, std::string(text_.substr(start, 2)), start};
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ';': return single(Tok::Semicolon);
      case ',': return single(Tok::Comma);
      case '/': return single(Tok::Slash);
      case '=': return single(Tok::Eq);
      case '!': return peek(1) == '=' ? dbl(Tok::Ne) : single(Tok::Bang);
      case '&':
        if (peek(1) == '&') return dbl(Tok::AndAnd);
        fail("expected '&&'");
      case '|':
        if (peek(1) == '|') return dbl(Tok::OrOr);
        fail("expected '||'");
      case '>': return peek(1) == '=' ? dbl(Tok::Ge) : single(Tok::Gt);
      case '^':
        if (peek(1) == '^') return dbl(Tok::Carets);
        fail("unexpected '^'");
      case '<':
        if (looks_like_iri()) {
          ++pos_;
          std::string iri;
          while (peek() != '>') iri += text_[pos_++];
          ++pos_;
          return {Tok::IriRef, iri, start};
        }
        return peek(1) == '=' ? dbl(Tok::Le) : single(Tok::Lt);
      case '?':
      case '$': {
        ++pos_;
        std::string name;
        while (name_char(peek()) && peek() != '-') name += text_[pos_++];
        if (name.empty()) fail("empty variable name");
        return {Tok::Var, name, start};
      }
      case '"':
      case '\'': return string_token();
      case '@': {
        ++pos_;
        std::string tag;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') tag += text_[pos_++];
        if (tag.empty()) fail("empty language tag");
        return {Tok::LangTag, tag, start};
      }
      case '.':
        if (std::isdigit(static_cast<unsigned char>(peek(1)))) return number_token();
        return single(Tok::Dot);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '+' || c == '-') && (std::isdigit(static_cast<unsigned char>(peek(1))) || peek(1) == '.'))) {
      return number_token();
    }
    if (name_char(c) || c == ':') {
      std::string word;
      while (name_char(peek())) word += text_[pos_++];
      if (peek() == ':') {
        word += text_[pos_++];
        while (name_char(peek()) || (peek() == '.' && name_char(peek(1))) || peek() == ':') {
          word += text_[pos_++];
        }
        return {Tok::PName, word, start};
      }
      return {Tok::Word, word, start};
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token number_token() {
    std::size_t start = pos_;
    std::string lex;
    if (peek() == '+' || peek() == '-') lex += text_[pos_++];
    while (std::isdigit(static_cast<unsigned char>(peek()))) lex += text_[pos_++];
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      lex += text_[pos_++];
      while (std::isdigit(static_cast<unsigned char>(peek()))) lex += text_[pos_++];
    }
    if (peek() == 'e' || peek() == 'E') {
      lex += text_[pos_++];
      if (peek() == '+' || peek() == '-') lex += text_[pos_++];
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
      while (std::isdigit(static_cast<unsigned char>(peek()))) lex += text_[pos_++];
    }
    return {Tok::Number, lex, start};
  }

  Token string_token() {
    std::size_t start = pos_;
    char quote = text_[pos_++];
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated string");
      char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\\') {
        char e = peek();
        ++pos_;
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          case '\\': out += '\\'; break;
          default: fail("unsupported escape");
        }
        continue;
      }
      out += c;
    }
    return {Tok::String, out, start};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool keyword(const Token& t, std::string_view kw) {
  if (t.kind != Tok::Word || t.text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  }
  return true;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const rdf::PrefixMap& prefixes)
      : tokens_(std::move(tokens)), prefixes_(prefixes) {}

  Query parse() {
    Query q;
    while (keyword(peek(), "PREFIX")) {
      advance();
      const Token& name = advance();
      if (name.kind != Tok::PName || name.text.back() != ':') fail("expected a prefix name after PREFIX");
      const Token& ns = advance();
      if (ns.kind != Tok::IriRef) fail("expected an IRI after the prefix name");
      prefixes_[name.text.substr(0, name.text.size() - 1)] = ns.text;
    }
    if (keyword(peek(), "ASK")) {
      advance();
      q.form = QueryForm::Ask;
    } else if (keyword(peek(), "SELECT")) {
      advance();
      q.form = QueryForm::Select;
      if (keyword(peek(), "DISTINCT")) {
        advance();
        q.distinct = true;
      }
      while (peek().kind == Tok::Var) q.projected.push_back(advance().text);
      if (q.projected.empty()) fail("SELECT needs at least one projected variable");
      if (keyword(peek(), "WHERE")) advance();
    } else {
      fail("expected ASK or SELECT");
    }
    if (q.form == QueryForm::Ask && keyword(peek(), "WHERE")) advance();
    q.pattern = group();
    if (peek().kind != Tok::End) fail("trailing input after query");

    auto vars = q.pattern_variables();
    for (const auto& v : q.projected) {
      if (!vars.count(v)) fail("projected variable ?" + v + " does not occur in the pattern");
    }
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw QueryParseError(peek().pos, msg); }

  const Token& peek(std::size_t k = 0) const {
    return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
  }
  const Token& advance() { return tokens_[pos_++]; }
  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    advance();
  }

  GraphPattern group() {
    expect(Tok::LBrace, "'{'");
    GraphPattern gp;
    bool need_separator = false;
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::RBrace) {
        advance();
        return gp;
      }
      if (t.kind == Tok::Dot) {
        advance();
        need_separator = false;
        continue;
      }
      if (keyword(t, "FILTER")) {
        advance();
        gp.filters.push_back(bracketted_expression());
        continue;
      }
      if (t.kind == Tok::LBrace) fail("nested groups are not supported");
      if (t.kind == Tok::Word) {
        for (const char* kw : {"OPTIONAL", "UNION", "MINUS", "BIND", "VALUES", "GRAPH", "SERVICE"}) {
          if (keyword(t, kw)) fail(std::string(kw) + " is not supported");
        }
      }
      if (t.kind == Tok::End) fail("unterminated group");
      if (need_separator) fail("expected '.' between triple patterns");
      triples_block(gp);
      need_separator = true;
    }
  }

  void triples_block(GraphPattern& gp) {
    PatternTerm subject = term_or_var(false);
    for (;;) {
      PatternPredicate predicate = verb();
      for (;;) {
        PatternTerm object = term_or_var(true);
        gp.triples.push_back({subject, predicate, object});
        if (peek().kind != Tok::Comma) break;
        advance();
      }
      if (peek().kind != Tok::Semicolon) return;
      while (peek().kind == Tok::Semicolon) advance();
      if (peek().kind == Tok::Dot || peek().kind == Tok::RBrace) return;
    }
  }

  PatternPredicate verb() {
    if (peek().kind == Tok::Var) return Variable{advance().text};
    std::vector<rdf::Term> steps;
    steps.push_back(path_step());
    while (peek().kind == Tok::Slash) {
      advance();
      steps.push_back(path_step());
    }
    if (steps.size() == 1) return steps.front();
    return Path{std::move(steps)};
  }

  rdf::Term path_step() {
    const Token& t = peek();
    if (t.kind == Tok::Word && t.text == "a") {
      advance();
      return rdf::Term::iri(ns::rdf_("type"));
    }
    if (t.kind == Tok::IriRef || t.kind == Tok::PName) return iri();
    fail("expected an IRI in predicate position");
  }

  rdf::Term iri() {
    const Token& t = advance();
    if (t.kind == Tok::IriRef) return rdf::Term::iri(t.text);
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) throw UnknownPrefixError(prefix);
    return rdf::Term::iri(it->second + t.text.substr(colon + 1));
  }

  PatternTerm term_or_var(bool allow_literal) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Var: return Variable{advance().text};
      case Tok::IriRef:
      case Tok::PName: return iri();
      case Tok::String:
      case Tok::Number:
        if (!allow_literal) fail("literal not allowed in subject position");
        return literal();
      case Tok::Word:
        if (t.text == "true" || t.text == "false") {
          if (!allow_literal) fail("literal not allowed in subject position");
          return literal();
        }
        if (t.text == "_") break;
        fail("unexpected keyword '" + t.text + "'");
      case Tok::LParen: fail("collections are not supported");
      default: break;
    }
    fail("expected a term or variable");
  }

  rdf::Term literal() {
    const Token t = advance();
    if (t.kind == Tok::Number) {
      std::string dt = "integer";
      if (t.text.find_first_of("eE") != std::string::npos) {
        dt = "double";
      } else if (t.text.find('.') != std::string::npos) {
        dt = "decimal";
      }
      return rdf::Term::typed(t.text, ns::xsd_(dt.c_str()));
    }
    if (t.kind == Tok::Word) return rdf::Term::boolean(t.text == "true");
    if (peek().kind == Tok::LangTag) return rdf::Term::lang_literal(t.text, advance().text);
    if (peek().kind == Tok::Carets) {
      advance();
      if (peek().kind != Tok::IriRef && peek().kind != Tok::PName) fail("expected datatype IRI");
      return rdf::Term::typed(t.text, iri().value());
    }
    return rdf::Term::literal(t.text);
  }

  FilterExpr bracketted_expression() {
    expect(Tok::LParen, "'(' after FILTER");
    FilterExpr e = or_expression();
    expect(Tok::RParen, "')'");
    return e;
  }

  FilterExpr or_expression() {
    FilterExpr lhs = and_expression();
    while (peek().kind == Tok::OrOr) {
      advance();
      FilterExpr rhs = and_expression();
      FilterExpr node;
      node.kind = FilterKind::Or;
      node.args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(node);
    }
    return lhs;
  }

  FilterExpr and_expression() {
    FilterExpr lhs = unary_expression();
    while (peek().kind == Tok::AndAnd) {
      advance();
      FilterExpr rhs = unary_expression();
      FilterExpr node;
      node.kind = FilterKind::And;
      node.args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(node);
    }
    return lhs;
  }

  FilterExpr unary_expression() {
    if (peek().kind == Tok::Bang) {
      advance();
      FilterExpr node;
      node.kind = FilterKind::Not;
      node.args = {unary_expression()};
      return node;
    }
    if (peek().kind == Tok::LParen) {
      advance();
      FilterExpr inner = or_expression();
      expect(Tok::RParen, "')'");
      return inner;
    }
    FilterExpr lhs = operand();
    std::optional<CompareOp> op;
    switch (peek().kind) {
      case Tok::Eq: op = CompareOp::Eq; break;
      case Tok::Ne: op = CompareOp::Ne; break;
      case Tok::Lt: op = CompareOp::Lt; break;
      case Tok::Le: op = CompareOp::Le; break;
      case Tok::Gt: op = CompareOp::Gt; break;
      case Tok::Ge: op = CompareOp::Ge; break;
      default: return lhs;
    }
    advance();
    FilterExpr node;
    node.kind = FilterKind::Compare;
    node.op = *op;
    node.args = {std::move(lhs), operand()};
    return node;
  }

  FilterExpr operand() {
    const Token& t = peek();
    FilterExpr e;
    e.kind = FilterKind::Operand;
    if (t.kind == Tok::Word && t.text != "true" && t.text != "false") {
      fail("function calls and keyword '" + t.text + "' are not supported in FILTER");
    }
    if (t.kind != Tok::Var && t.kind != Tok::IriRef && t.kind != Tok::PName && t.kind != Tok::String &&
        t.kind != Tok::Number && t.kind != Tok::Word) {
      fail("expected a FILTER operand");
    }
    e.operand = term_or_var(true);
    return e;
  }

  std::vector<Token> tokens_;
  rdf::PrefixMap prefixes_;
  std::size_t pos_ = 0;
};

void collect_filter_vars(const FilterExpr& e, std::set<std::string>& out) {
  if (e.kind == FilterKind::Operand) {
    if (auto* v = std::get_if<Variable>(&e.operand)) out.insert(v->name);
    return;
  }
  for (const auto& a : e.args) collect_filter_vars(a, out);
}

PatternTerm substitute_term(const PatternTerm& t, const Solution& b) {
  if (auto* v = std::get_if<Variable>(&t)) {
    auto it = b.find(v->name);
    if (it != b.end()) return it->second;
  }
  return t;
}

FilterExpr substitute_filter(const FilterExpr& e, const Solution& b) {
  FilterExpr out = e;
  if (e.kind == FilterKind::Operand) {
    out.operand = substitute_term(e.operand, b);
  } else {
    for (auto& a : out.args) a = substitute_filter(a, b);
  }
  return out;
}

}  // namespace

std::set<std::string> Query::pattern_variables() const {
  std::set<std::string> out;
  auto add = [&](const auto& t) {
    if (auto* v = std::get_if<Variable>(&t)) out.insert(v->name);
  };
  for (const auto& tp : pattern.triples) {
    add(tp.subject);
    add(tp.predicate);
    add(tp.object);
  }
  return out;
}

std::set<std::string> Query::all_variables() const {
  auto out = pattern_variables();
  for (const auto& f : pattern.filters) collect_filter_vars(f, out);
  return out;
}

Query parse_sparql(std::string_view text, const rdf::PrefixMap& prefixes) {
  return Parser(Lexer(text).run(), prefixes).parse();
}

Query substitute(const Query& q, const Solution& bindings) {
  Query out = q;
  for (auto& tp : out.pattern.triples) {
    tp.subject = substitute_term(tp.subject, bindings);
    tp.object = substitute_term(tp.object, bindings);
    if (auto* v = std::get_if<Variable>(&tp.predicate)) {
      auto it = bindings.find(v->name);
      if (it != bindings.end()) tp.predicate = it->second;
    }
  }
  for (auto& f : out.pattern.filters) f = substitute_filter(f, bindings);
  return out;
}

std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

}  // namespace spn::sparql
