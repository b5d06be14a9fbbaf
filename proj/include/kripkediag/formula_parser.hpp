#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kripkediag/formula.hpp"
#include "kripkediag/kripke_model.hpp"

// Concrete syntax for modal formulas:
//
//   atom      identifier ([A-Za-z_][A-Za-z0-9_]*)
//   !f        negation          []f   necessity        <>f   possibility
//   f & g     conjunction (left-assoc)
//   f | g     disjunction (left-assoc)
//   f -> g    implication (right-assoc)
//
// Unary operators bind tightest, then &, then |, then ->.

namespace kdiag::lang {

using modal::Formula;
using modal::FormulaKind;

enum class ParseErrorKind { Lexical, Syntax, Empty };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& message)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + message),
        kind_(kind),
        offset_(offset),
        detail_(message) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
  std::string detail_;
};

namespace detail {

enum class Tok { Ident, Not, And, Or, Implies, Box, Diamond, LParen, RParen, End };

struct Token {
  Tok type;
  std::size_t offset;
  std::string text;
};

inline const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Not: return "'!'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'->'";
    case Tok::Box: return "'[]'";
    case Tok::Diamond: return "'<>'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  auto ident_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto ident_char = [&](char c) { return ident_start(c) || (c >= '0' && c <= '9'); };
  auto two = [&](std::size_t i, char second) { return i + 1 < text.size() && text[i + 1] == second; };

  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (ident_start(c)) {
      std::size_t start = i;
      while (i < text.size() && ident_char(text[i])) ++i;
      tokens.push_back({Tok::Ident, start, std::string(text.substr(start, i - start))});
    } else if (c == '!') {
      tokens.push_back({Tok::Not, i++, "!"});
    } else if (c == '&') {
      tokens.push_back({Tok::And, i++, "&"});
    } else if (c == '|') {
      tokens.push_back({Tok::Or, i++, "|"});
    } else if (c == '(') {
      tokens.push_back({Tok::LParen, i++, "("});
    } else if (c == ')') {
      tokens.push_back({Tok::RParen, i++, ")"});
    } else if (c == '-' && two(i, '>')) {
      tokens.push_back({Tok::Implies, i, "->"});
      i += 2;
    } else if (c == '[' && two(i, ']')) {
      tokens.push_back({Tok::Box, i, "[]"});
      i += 2;
    } else if (c == '<' && two(i, '>')) {
      tokens.push_back({Tok::Diamond, i, "<>"});
      i += 2;
    } else {
      throw ParseError(ParseErrorKind::Lexical, i,
                       std::string("unexpected character '") + c + "'");
    }
  }
  tokens.push_back({Tok::End, text.size(), ""});
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula parse_all() {
    Formula f = implication();
    if (peek().type != Tok::End) fail("expected end of input");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }
  bool accept(Tok t) {
    if (peek().type != t) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.type == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(ParseErrorKind::Syntax, t.offset, expected + ", found " + found);
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept(Tok::Implies)) return Formula::implication(std::move(lhs), implication());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept(Tok::Or)) f = Formula::disjunction(std::move(f), conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (accept(Tok::And)) f = Formula::conjunction(std::move(f), unary());
    return f;
  }

  Formula unary() {
    if (accept(Tok::Not)) return Formula::negation(unary());
    if (accept(Tok::Box)) return Formula::box(unary());
    if (accept(Tok::Diamond)) return Formula::diamond(unary());
    return primary();
  }

  Formula primary() {
    if (peek().type == Tok::Ident) return Formula::atom(advance().text);
    if (accept(Tok::LParen)) {
      Formula f = implication();
      if (!accept(Tok::RParen)) fail(std::string("expected ") + describe(Tok::RParen));
      return f;
    }
    fail("expected identifier, '(' or a unary operator");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline int precedence(FormulaKind k) {
  switch (k) {
    case FormulaKind::Implies: return 1;
    case FormulaKind::Or: return 2;
    case FormulaKind::And: return 3;
    case FormulaKind::Not:
    case FormulaKind::Box:
    case FormulaKind::Diamond: return 4;
    case FormulaKind::Atom: return 5;
  }
  return 0;
}

}  // namespace detail

inline Formula parse(std::string_view text) {
  auto tokens = detail::tokenize(text);
  if (tokens.size() == 1) throw ParseError(ParseErrorKind::Empty, 0, "empty formula");
  return detail::Parser(std::move(tokens)).parse_all();
}

enum class RenderStyle { Ascii, Unicode };

namespace detail {

inline void render_into(const Formula& f, RenderStyle style, std::string& out);

inline void render_child(const Formula& child, bool parens, RenderStyle style, std::string& out) {
  if (parens) out += '(';
  render_into(child, style, out);
  if (parens) out += ')';
}

inline void render_into(const Formula& f, RenderStyle style, std::string& out) {
  const bool uni = style == RenderStyle::Unicode;
  const int prec = precedence(f.kind());
  switch (f.kind()) {
    case FormulaKind::Atom:
      out += f.proposition().name();
      return;
    case FormulaKind::Not:
    case FormulaKind::Box:
    case FormulaKind::Diamond: {
      if (f.kind() == FormulaKind::Not) out += uni ? "¬" : "!";
      if (f.kind() == FormulaKind::Box) out += uni ? "□" : "[]";
      if (f.kind() == FormulaKind::Diamond) out += uni ? "◇" : "<>";
      render_child(f.operand(), precedence(f.operand().kind()) < prec, style, out);
      return;
    }
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      break;
  }

  const char* op = nullptr;
  if (f.kind() == FormulaKind::And) op = uni ? " ∧ " : " & ";
  if (f.kind() == FormulaKind::Or) op = uni ? " ∨ " : " | ";
  if (f.kind() == FormulaKind::Implies) op = uni ? " → " : " -> ";

  const int lp = precedence(f.lhs().kind());
  const int rp = precedence(f.rhs().kind());
  // -> groups to the right; & and | group to the left.
  const bool right_assoc = f.kind() == FormulaKind::Implies;
  render_child(f.lhs(), right_assoc ? lp <= prec : lp < prec, style, out);
  out += op;
  render_child(f.rhs(), right_assoc ? rp < prec : rp <= prec, style, out);
}

}  // namespace detail

/// Canonical text with the fewest parentheses that still reparse to `f`.
inline std::string render(const Formula& f, RenderStyle style = RenderStyle::Ascii) {
  std::string out;
  detail::render_into(f, style, out);
  return out;
}

struct AxiomEntry {
  std::string label;
  std::string source;
  Formula formula;
};

class AxiomFileError : public std::runtime_error {
 public:
  AxiomFileError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Line-oriented axiom file: `label: formula`, `#` to end of line is a comment.
struct AxiomFile {
  std::vector<AxiomEntry> entries;

  modal::AxiomSet to_axiom_set() const {
    modal::AxiomSet set;
    for (const auto& e : entries) set.add(e.label, e.formula);
    return set;
  }
};

inline AxiomFile parse_axiom_file(std::string_view text) {
  AxiomFile file;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw AxiomFileError(line_no, 1, "expected 'label: formula'");

    std::string_view raw_label = line.substr(0, colon);
    auto lb = raw_label.find_first_not_of(" \t");
    auto le = raw_label.find_last_not_of(" \t");
    std::string label = lb == std::string_view::npos
                            ? std::string{}
                            : std::string(raw_label.substr(lb, le - lb + 1));
    if (!modal::is_identifier(label))
      throw AxiomFileError(line_no, lb == std::string_view::npos ? 1 : lb + 1,
                           "invalid axiom label '" + label + "'");
    for (const auto& e : file.entries)
      if (e.label == label)
        throw AxiomFileError(line_no, lb + 1, "duplicate axiom label '" + label + "'");

    std::string_view source = line.substr(colon + 1);
    try {
      Formula f = parse(source);
      auto sb = source.find_first_not_of(" \t");
      auto se = source.find_last_not_of(" \t\r");
      file.entries.push_back(
          AxiomEntry{std::move(label), std::string(source.substr(sb, se - sb + 1)), std::move(f)});
    } catch (const ParseError& e) {
      throw AxiomFileError(line_no, colon + 2 + e.offset(), e.detail());
    }
  }
  return file;
}

inline AxiomFile load_axiom_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read axiom file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_axiom_file(buf.str());
}

}  // namespace kdiag::lang
