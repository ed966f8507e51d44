// Parser for the Mace4-style input language of the puzzle corpus, plus
// theory merging and formatting.
//
// Accepted shape:
//
//   assign(domain_size, N).        % optional for constraint-only files
//   assign(max_models, M).         % optional, default -1 (all models)
//   set(arithmetic).               % accepted, no semantic effect
//   formulas(assumptions).
//     <formula>.
//     ...
//   end_of_list.
//
// Operator precedence, tightest first: unary -, then *, then + and
// binary -, then = != < <= > >=, then &, then |, then ->, then <->.
// Quantifiers bind weakest: `all x p(x) -> q` reads all x (p(x) -> q).
// `->` and `<->` associate to the right, the rest to the left.
//
// The quantified identifier is a variable inside its body. Every other
// unapplied identifier is a constant: unlike full Mace4 there is no
// implicit quantification of lowercase u..z, so theories must quantify
// explicitly (all corpus encodings do).
//
// An identifier applied (or standing alone) in formula position is a
// predicate; in term position it is a function. Using one name both
// ways, or at two arities, is an error.
#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "laplace/ast.hpp"

namespace laplace {

// A file could not be read at all (as opposed to failing to parse).
struct IoError : Error {
  using Error::Error;
};

struct SourceFile {
  std::string text;
  std::string origin = "<memory>";

  static SourceFile from_string(std::string text) { return {std::move(text), "<memory>"}; }

  static SourceFile load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return {buf.str(), path};
  }
};

struct ParseDiagnostic {
  int line = 1;
  int column = 1;
  std::string message;
};

struct ParseResult {
  std::optional<Theory> theory;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return theory.has_value(); }
};

namespace detail {

enum class Tok {
  Ident, Int, LParen, RParen, Comma, Period,
  Amp, Bar, Arrow, IffOp, Eq, Ne, Lt, Le, Gt, Ge,
  Minus, Plus, Star, End, Bad
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  int line = 1;
  int column = 1;
  long long int_value = 0;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> lex(const std::string& text, std::vector<ParseDiagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  const size_t n = text.size();
  auto push = [&](Tok k, size_t begin, size_t len, int l, int c) {
    out.push_back({k, std::string_view(text).substr(begin, len), l, c, 0});
  };
  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++col;
      ++i;
      continue;
    }
    if (c == '%') {  // comment to end of line
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    int tl = line, tc = col;
    if (ident_start(c)) {
      size_t b = i;
      while (i < n && ident_char(text[i])) ++i, ++col;
      push(Tok::Ident, b, i - b, tl, tc);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t b = i;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++col;
      Token t{Tok::Int, std::string_view(text).substr(b, i - b), tl, tc, 0};
      auto [p, ec] = std::from_chars(text.data() + b, text.data() + i, t.int_value);
      if (ec != std::errc()) {
        diags.push_back({tl, tc, "integer literal out of range"});
        t.int_value = 0;
      }
      out.push_back(t);
      continue;
    }
    auto two = [&](char a, char b2) { return c == a && i + 1 < n && text[i + 1] == b2; };
    if (c == '<' && i + 2 < n && text[i + 1] == '-' && text[i + 2] == '>') {
      push(Tok::IffOp, i, 3, tl, tc);
      i += 3;
      col += 3;
      continue;
    }
    if (two('-', '>')) { push(Tok::Arrow, i, 2, tl, tc); i += 2; col += 2; continue; }
    if (two('!', '=')) { push(Tok::Ne, i, 2, tl, tc); i += 2; col += 2; continue; }
    if (two('<', '=')) { push(Tok::Le, i, 2, tl, tc); i += 2; col += 2; continue; }
    if (two('>', '=')) { push(Tok::Ge, i, 2, tl, tc); i += 2; col += 2; continue; }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Period; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case '=': k = Tok::Eq; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '-': k = Tok::Minus; break;
      case '+': k = Tok::Plus; break;
      case '*': k = Tok::Star; break;
      default: k = Tok::Bad; break;
    }
    push(k, i, 1, tl, tc);
    ++i;
    ++col;
  }
  Token eof;
  eof.kind = Tok::End;
  eof.line = line;
  eof.column = col;
  out.push_back(eof);
  return out;
}

// Parse-time value that may still be either a term or a formula. A bare
// or applied identifier starts life as a term and is reinterpreted as a
// predicate atom if it ends up in formula position.
struct PNode {
  TermPtr term;
  FormulaPtr formula;
  int line = 1, column = 1;
};

class Parser {
 public:
  explicit Parser(const SourceFile& src) : tokens_(lex(src.text, diags_)) {}

  ParseResult run() {
    while (!at(Tok::End)) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && t.text == "assign") {
        parse_assign();
      } else if (t.kind == Tok::Ident && t.text == "set") {
        parse_set();
      } else if (t.kind == Tok::Ident && t.text == "formulas") {
        parse_block();
      } else {
        error(t, "expected a directive or a formulas(assumptions) block");
        sync_to_period();
      }
    }
    ParseResult res;
    res.diagnostics = std::move(diags_);
    if (res.diagnostics.empty()) {
      Theory th;
      th.domain_size = domain_size_;
      th.max_models = max_models_.value_or(-1);
      th.formulas = std::move(formulas_);
      th.signature = std::move(signature_);
      res.theory = std::move(th);
    }
    return res;
  }

 private:
  static constexpr int kMaxDepth = 200;

  std::vector<ParseDiagnostic> diags_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  int depth_ = 0;

  std::optional<int> domain_size_;
  std::optional<long long> max_models_;
  std::vector<FormulaPtr> formulas_;
  Signature signature_;
  std::vector<std::string_view> scope_;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    advance();
    return true;
  }

  void error(const Token& t, std::string msg) {
    diags_.push_back({t.line, t.column, std::move(msg)});
  }

  bool expect(Tok k, const char* what) {
    if (accept(k)) return true;
    error(peek(), std::string("expected ") + what);
    return false;
  }

  void sync_to_period() {
    while (!at(Tok::End) && !accept(Tok::Period)) advance();
  }

  void record_symbol(std::string_view name, int arity, SymbolKind kind, const Token& t) {
    try {
      signature_.declare(name, arity, kind);
    } catch (const ArityConflict& e) {
      error(t, e.what());
    }
  }
  void record_symbol(std::string_view name, int arity, SymbolKind kind, const PNode& n) {
    Token t;
    t.line = n.line;
    t.column = n.column;
    record_symbol(name, arity, kind, t);
  }

  // ---- directives

  void parse_assign() {
    advance();  // assign
    if (!expect(Tok::LParen, "'(' after assign")) return sync_to_period();
    const Token key = peek();
    if (!expect(Tok::Ident, "an assign key")) return sync_to_period();
    if (!expect(Tok::Comma, "','")) return sync_to_period();
    bool neg = accept(Tok::Minus);
    const Token val = peek();
    if (!expect(Tok::Int, "an integer value")) return sync_to_period();
    long long value = neg ? -val.int_value : val.int_value;
    if (!expect(Tok::RParen, "')'") || !expect(Tok::Period, "'.' after directive"))
      return sync_to_period();

    if (key.text == "domain_size") {
      if (domain_size_) return error(key, "domain_size assigned twice");
      if (value < 1) return error(val, "domain_size must be >= 1");
      domain_size_ = static_cast<int>(value);
    } else if (key.text == "max_models") {
      if (max_models_) return error(key, "max_models assigned twice");
      if (value != -1 && value < 1) return error(val, "max_models must be -1 or >= 1");
      max_models_ = value;
    } else {
      error(key, "unknown assign key '" + std::string(key.text) + "'");
    }
  }

  void parse_set() {
    advance();  // set
    if (!expect(Tok::LParen, "'(' after set")) return sync_to_period();
    const Token flag = peek();
    if (!expect(Tok::Ident, "a flag name")) return sync_to_period();
    if (!expect(Tok::RParen, "')'") || !expect(Tok::Period, "'.' after directive"))
      return sync_to_period();
    if (flag.text != "arithmetic")
      error(flag, "unknown flag '" + std::string(flag.text) + "' (only set(arithmetic) is supported)");
  }

  // ---- formulas block

  void parse_block() {
    advance();  // formulas
    if (!expect(Tok::LParen, "'(' after formulas")) return sync_to_period();
    const Token list = peek();
    if (!expect(Tok::Ident, "a list name")) return sync_to_period();
    if (list.text != "assumptions")
      error(list, "only formulas(assumptions) lists are supported");
    if (!expect(Tok::RParen, "')'") || !expect(Tok::Period, "'.' after formulas(assumptions)"))
      return sync_to_period();

    while (true) {
      if (at(Tok::End)) {
        error(peek(), "missing end_of_list");
        return;
      }
      if (at(Tok::Ident) && peek().text == "end_of_list") {
        advance();
        expect(Tok::Period, "'.' after end_of_list");
        return;
      }
      size_t before = diags_.size();
      depth_ = 0;
      PNode node = parse_expr(0);
      if (diags_.size() != before) {
        sync_to_period();
        continue;
      }
      FormulaPtr f = to_formula(node);
      expect(Tok::Period, "'.' after formula");
      if (f) formulas_.push_back(std::move(f));
    }
  }

  // ---- expressions (Pratt)

  struct InfixInfo {
    int bp = 0;
    bool right_assoc = false;
    bool is_compare = false;
  };

  static std::optional<InfixInfo> infix_info(Tok k) {
    switch (k) {
      case Tok::IffOp: return InfixInfo{10, true, false};
      case Tok::Arrow: return InfixInfo{20, true, false};
      case Tok::Bar: return InfixInfo{30, false, false};
      case Tok::Amp: return InfixInfo{40, false, false};
      case Tok::Eq:
      case Tok::Ne:
      case Tok::Lt:
      case Tok::Le:
      case Tok::Gt:
      case Tok::Ge: return InfixInfo{50, false, true};
      case Tok::Plus:
      case Tok::Minus: return InfixInfo{60, false, false};
      case Tok::Star: return InfixInfo{70, false, false};
      default: return std::nullopt;
    }
  }

  static CompareOp compare_op(Tok k) {
    switch (k) {
      case Tok::Eq: return CompareOp::Eq;
      case Tok::Ne: return CompareOp::Ne;
      case Tok::Lt: return CompareOp::Lt;
      case Tok::Le: return CompareOp::Le;
      case Tok::Gt: return CompareOp::Gt;
      default: return CompareOp::Ge;
    }
  }

  PNode error_node(const Token& t) {
    PNode n;
    n.term = Term::literal(0);
    n.line = t.line;
    n.column = t.column;
    return n;
  }

  bool in_scope(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (*it == name) return true;
    return false;
  }

  PNode parse_expr(int min_bp) {
    if (++depth_ > kMaxDepth) {
      error(peek(), "expression nested too deeply");
      sync_to_period();
      --depth_;
      return error_node(peek());
    }
    PNode lhs = parse_prefix();
    while (true) {
      auto info = infix_info(peek().kind);
      if (!info || info->bp < min_bp) break;
      const Token op = advance();
      PNode rhs = parse_expr(info->right_assoc ? info->bp : info->bp + 1);
      lhs = combine(op, std::move(lhs), std::move(rhs));
    }
    --depth_;
    return lhs;
  }

  PNode parse_prefix() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Minus: {
        advance();
        PNode operand = parse_expr(80);
        PNode out;
        out.line = t.line;
        out.column = t.column;
        if (operand.term && operand.term->kind == TermKind::IntLiteral) {
          out.term = Term::literal(-operand.term->value);
        } else {
          // '-' on anything but an integer literal is logical negation;
          // there is no unary arithmetic minus in the term language.
          out.formula = Formula::negate(to_formula(std::move(operand)));
        }
        return out;
      }
      case Tok::Int: {
        advance();
        PNode out;
        out.term = Term::literal(t.int_value);
        out.line = t.line;
        out.column = t.column;
        return out;
      }
      case Tok::LParen: {
        advance();
        PNode inner = parse_expr(0);
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        if (t.text == "all" || t.text == "exists") return parse_quantifier();
        advance();
        PNode out;
        out.line = t.line;
        out.column = t.column;
        if (at(Tok::LParen)) {
          advance();
          std::vector<TermPtr> args;
          if (!at(Tok::RParen)) {
            do {
              args.push_back(to_term(parse_expr(0)));
            } while (accept(Tok::Comma));
          }
          expect(Tok::RParen, "')' after arguments");
          if (in_scope(t.text)) {
            error(t, "quantified variable '" + std::string(t.text) + "' cannot take arguments");
            return error_node(t);
          }
          out.term = Term::apply(std::string(t.text), std::move(args));
        } else if (in_scope(t.text)) {
          out.term = Term::variable(std::string(t.text));
        } else {
          out.term = Term::apply(std::string(t.text));  // constant or nullary atom
        }
        return out;
      }
      default:
        advance();
        if (t.kind == Tok::Bad)
          error(t, "unexpected character '" + std::string(t.text) + "'");
        else
          error(t, "expected a formula or term");
        return error_node(t);
    }
  }

  PNode parse_quantifier() {
    const Token q = advance();
    const Token var = peek();
    if (!expect(Tok::Ident, "a variable name after quantifier")) return error_node(q);
    scope_.push_back(var.text);
    PNode body = parse_expr(0);  // quantifiers bind weakest
    scope_.pop_back();
    PNode out;
    out.line = q.line;
    out.column = q.column;
    FormulaKind kind = q.text == "all" ? FormulaKind::ForAll : FormulaKind::Exists;
    out.formula = Formula::quantifier(kind, std::string(var.text), to_formula(body));
    return out;
  }

  PNode combine(const Token& op, PNode lhs, PNode rhs) {
    PNode out;
    out.line = lhs.line;
    out.column = lhs.column;
    auto info = infix_info(op.kind);
    if (info->is_compare) {
      if (lhs.formula && lhs.formula->kind == FormulaKind::Compare) {
        error(op, "chained comparisons are not supported");
        return error_node(op);
      }
      out.formula = Formula::compare(compare_op(op.kind), to_term(std::move(lhs)),
                                     to_term(std::move(rhs)));
      return out;
    }
    switch (op.kind) {
      case Tok::Plus:
      case Tok::Minus:
      case Tok::Star: {
        ArithKind k = op.kind == Tok::Plus ? ArithKind::Add
                      : op.kind == Tok::Minus ? ArithKind::Sub
                                              : ArithKind::Mul;
        out.term = Term::arith(k, to_term(std::move(lhs)), to_term(std::move(rhs)));
        return out;
      }
      case Tok::Amp:
        out.formula = Formula::conj(to_formula(std::move(lhs)), to_formula(std::move(rhs)));
        return out;
      case Tok::Bar:
        out.formula = Formula::disj(to_formula(std::move(lhs)), to_formula(std::move(rhs)));
        return out;
      case Tok::Arrow:
        out.formula = Formula::implies(to_formula(std::move(lhs)), to_formula(std::move(rhs)));
        return out;
      default:
        out.formula = Formula::iff(to_formula(std::move(lhs)), to_formula(std::move(rhs)));
        return out;
    }
  }

  // A term-shaped node used in formula position becomes a predicate atom.
  FormulaPtr to_formula(PNode n) {
    if (n.formula) return std::move(n.formula);
    if (n.term && n.term->kind == TermKind::Apply) {
      record_symbol(n.term->name, static_cast<int>(n.term->args.size()), SymbolKind::Predicate, n);
      return Formula::pred(n.term->name, n.term->args);
    }
    Token t;
    t.line = n.line;
    t.column = n.column;
    if (n.term && n.term->kind == TermKind::Variable)
      error(t, "quantified variable '" + n.term->name + "' used as a formula");
    else
      error(t, "arithmetic expression used where a formula is required");
    return Formula::pred("<error>");
  }

  // A node used in term position must be a term; its head symbol, if
  // applied, is a function.
  TermPtr to_term(PNode n) {
    if (n.formula) {
      Token t;
      t.line = n.line;
      t.column = n.column;
      error(t, "formula used inside a term");
      return Term::literal(0);
    }
    if (n.term->kind == TermKind::Apply)
      record_symbol(n.term->name, static_cast<int>(n.term->args.size()), SymbolKind::Function, n);
    return std::move(n.term);
  }
};

}  // namespace detail

inline ParseResult parse_theory(const SourceFile& src) {
  detail::Parser p(src);
  return p.run();
}

inline ParseResult parse_theory(std::string_view text) {
  return parse_theory(SourceFile::from_string(std::string(text)));
}

// Thrown by load_theory_file when the text does not parse; carries the
// diagnostics so callers can print them with positions.
struct ParseFailed : Error {
  std::string origin;
  std::vector<ParseDiagnostic> diagnostics;

  ParseFailed(std::string origin_, std::vector<ParseDiagnostic> diags)
      : Error("parse of '" + origin_ + "' failed"),
        origin(std::move(origin_)),
        diagnostics(std::move(diags)) {}
};

inline Theory load_theory_file(const std::string& path) {
  SourceFile src = SourceFile::load(path);
  ParseResult res = parse_theory(src);
  if (!res.ok()) throw ParseFailed(src.origin, std::move(res.diagnostics));
  return std::move(*res.theory);
}

// Appends the extra theory's formulas to the base theory. The possible
// theory of a puzzle is the base; a favorable-constraint file (which may
// omit all directives) is the extra.
inline Theory merge_theories(const Theory& base, const Theory& extra) {
  Theory out = base;
  if (extra.domain_size) {
    if (out.domain_size && *out.domain_size != *extra.domain_size)
      throw DomainMismatch("domain sizes differ: " + std::to_string(*out.domain_size) + " vs " +
                           std::to_string(*extra.domain_size));
    out.domain_size = extra.domain_size;
  }
  out.signature.merge_from(extra.signature);
  out.formulas.insert(out.formulas.end(), extra.formulas.begin(), extra.formulas.end());
  return out;
}

// ---------------------------------------------------------- formatting

namespace detail {

inline void print_term(std::ostream& os, const Term& t, int parent_bp);

inline int term_bp(const Term& t) {
  switch (t.kind) {
    case TermKind::ArithOp: return t.op == ArithKind::Mul ? 70 : 60;
    default: return 100;
  }
}

inline void print_term(std::ostream& os, const Term& t, int parent_bp) {
  int bp = term_bp(t);
  bool parens = bp < parent_bp;
  if (parens) os << '(';
  switch (t.kind) {
    case TermKind::Variable:
      os << t.name;
      break;
    case TermKind::IntLiteral:
      os << t.value;
      break;
    case TermKind::Apply:
      os << t.name;
      if (!t.args.empty()) {
        os << '(';
        for (size_t i = 0; i < t.args.size(); ++i) {
          if (i) os << ", ";
          print_term(os, *t.args[i], 0);
        }
        os << ')';
      }
      break;
    case TermKind::ArithOp: {
      const char* op = t.op == ArithKind::Add ? " + " : t.op == ArithKind::Sub ? " - " : " * ";
      print_term(os, *t.args[0], bp);
      os << op;
      print_term(os, *t.args[1], bp + 1);  // left-associative
      break;
    }
  }
  if (parens) os << ')';
}

inline int formula_bp(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Iff: return 10;
    case FormulaKind::Implies: return 20;
    case FormulaKind::Or: return 30;
    case FormulaKind::And: return 40;
    case FormulaKind::Compare: return 50;
    case FormulaKind::Not: return 80;
    default: return 100;  // atoms and quantifiers (always self-delimiting)
  }
}

inline const char* compare_text(CompareOp rel) {
  switch (rel) {
    case CompareOp::Eq: return " = ";
    case CompareOp::Ne: return " != ";
    case CompareOp::Lt: return " < ";
    case CompareOp::Le: return " <= ";
    case CompareOp::Gt: return " > ";
    case CompareOp::Ge: return " >= ";
  }
  return " = ";
}

inline void print_formula(std::ostream& os, const Formula& f, int parent_bp) {
  int bp = formula_bp(f);
  bool parens = bp < parent_bp;
  if (parens) os << '(';
  switch (f.kind) {
    case FormulaKind::Compare:
      print_term(os, *f.lhs, 51);
      os << compare_text(f.rel);
      print_term(os, *f.rhs, 51);
      break;
    case FormulaKind::PredAtom:
      os << f.name;
      if (!f.args.empty()) {
        os << '(';
        for (size_t i = 0; i < f.args.size(); ++i) {
          if (i) os << ", ";
          print_term(os, *f.args[i], 0);
        }
        os << ')';
      }
      break;
    case FormulaKind::Not:
      os << '-';
      print_formula(os, *f.a, 81);
      break;
    case FormulaKind::And:
    case FormulaKind::Or: {
      print_formula(os, *f.a, bp);
      os << (f.kind == FormulaKind::And ? " & " : " | ");
      print_formula(os, *f.b, bp + 1);
      break;
    }
    case FormulaKind::Implies:
    case FormulaKind::Iff: {
      print_formula(os, *f.a, bp + 1);  // right-associative
      os << (f.kind == FormulaKind::Implies ? " -> " : " <-> ");
      print_formula(os, *f.b, bp);
      break;
    }
    case FormulaKind::ForAll:
    case FormulaKind::Exists:
      os << (f.kind == FormulaKind::ForAll ? "all " : "exists ") << f.name << " (";
      print_formula(os, *f.a, 0);
      os << ')';
      break;
  }
  if (parens) os << ')';
}

}  // namespace detail

inline std::string format_formula(const Formula& f) {
  std::ostringstream os;
  detail::print_formula(os, f, 0);
  return os.str();
}

// Emits parseable text; parsing it back yields a structurally equal
// theory.
inline std::string format_theory(const Theory& th) {
  std::ostringstream os;
  if (th.domain_size) os << "assign(domain_size, " << *th.domain_size << ").\n";
  os << "assign(max_models, " << th.max_models << ").\n\n";
  os << "formulas(assumptions).\n";
  for (const FormulaPtr& f : th.formulas) {
    os << "  ";
    detail::print_formula(os, *f, 0);
    os << ".\n";
  }
  os << "end_of_list.\n";
  return os.str();
}

}  // namespace laplace
