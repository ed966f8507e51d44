// Core syntax and model types for finite-domain first-order theories:
// terms, formulas, signatures, theories, interpretations.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace laplace {

// --------------------------------------------------------------- errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A function or predicate was applied to an integer outside 0..n-1.
// This always signals an ill-formed encoding; it is never treated as a
// false atom, which would silently mask the bug.
struct OutOfDomainApplication : Error {
  using Error::Error;
};

// Interpretation tables and theory signature disagree (unknown symbol,
// wrong kind, wrong arity, or wrong domain size).
struct SignatureMismatch : Error {
  using Error::Error;
};

// One symbol used at two arities, or as both function and predicate.
struct ArityConflict : Error {
  using Error::Error;
};

// Two theories with explicit, different domain sizes cannot be merged.
struct DomainMismatch : Error {
  using Error::Error;
};

// The "possible" theory of a puzzle has no models at all; the puzzle
// encoding is inconsistent and a probability is undefined.
struct ZeroPossibleModels : Error {
  using Error::Error;
};

// A probability was requested from a count that was cut short by a
// max_models limit.
struct NonExhaustiveCount : Error {
  using Error::Error;
};

// The brute-force oracle refused to sweep an assignment space larger
// than its budget.
struct BudgetExceeded : Error {
  using Error::Error;
};

// ---------------------------------------------------------------- terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermKind { Variable, IntLiteral, Apply, ArithOp };
enum class ArithKind { Add, Sub, Mul };

// Immutable term node. Nodes are shared freely; nothing mutates them
// after construction, so concurrent readers are safe.
struct Term {
  TermKind kind;
  std::string name;               // Variable name or Apply symbol
  long long value = 0;            // IntLiteral payload
  ArithKind op = ArithKind::Add;  // ArithOp payload
  std::vector<TermPtr> args;      // Apply arguments; ArithOp has two

  static TermPtr variable(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Variable;
    t->name = std::move(name);
    return t;
  }
  static TermPtr literal(long long value) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::IntLiteral;
    t->value = value;
    return t;
  }
  static TermPtr apply(std::string symbol, std::vector<TermPtr> args = {}) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Apply;
    t->name = std::move(symbol);
    t->args = std::move(args);
    return t;
  }
  static TermPtr arith(ArithKind op, TermPtr lhs, TermPtr rhs) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::ArithOp;
    t->op = op;
    t->args = {std::move(lhs), std::move(rhs)};
    return t;
  }
};

inline bool equal(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TermKind::Variable:
      return a.name == b.name;
    case TermKind::IntLiteral:
      return a.value == b.value;
    case TermKind::Apply:
      if (a.name != b.name) return false;
      break;
    case TermKind::ArithOp:
      if (a.op != b.op) return false;
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

inline bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return equal(*a, *b);
}

// ------------------------------------------------------------- formulas

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class FormulaKind { Compare, PredAtom, Not, And, Or, Implies, Iff, ForAll, Exists };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Formula {
  FormulaKind kind;
  CompareOp rel = CompareOp::Eq;  // Compare payload
  TermPtr lhs, rhs;               // Compare operands
  std::string name;               // PredAtom symbol / quantified variable
  std::vector<TermPtr> args;      // PredAtom arguments
  FormulaPtr a, b;                // children; unary and quantifiers use a

  // > and >= are accepted on the surface but normalized here to < / <=
  // with swapped operands, so downstream code sees four relations.
  static FormulaPtr compare(CompareOp rel, TermPtr lhs, TermPtr rhs) {
    if (rel == CompareOp::Gt) return compare(CompareOp::Lt, std::move(rhs), std::move(lhs));
    if (rel == CompareOp::Ge) return compare(CompareOp::Le, std::move(rhs), std::move(lhs));
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Compare;
    f->rel = rel;
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    return f;
  }
  static FormulaPtr pred(std::string symbol, std::vector<TermPtr> args = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::PredAtom;
    f->name = std::move(symbol);
    f->args = std::move(args);
    return f;
  }
  static FormulaPtr negate(FormulaPtr g) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Not;
    f->a = std::move(g);
    return f;
  }
  static FormulaPtr binary(FormulaKind kind, FormulaPtr lhs, FormulaPtr rhs) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->a = std::move(lhs);
    f->b = std::move(rhs);
    return f;
  }
  static FormulaPtr conj(FormulaPtr l, FormulaPtr r) { return binary(FormulaKind::And, std::move(l), std::move(r)); }
  static FormulaPtr disj(FormulaPtr l, FormulaPtr r) { return binary(FormulaKind::Or, std::move(l), std::move(r)); }
  static FormulaPtr implies(FormulaPtr l, FormulaPtr r) { return binary(FormulaKind::Implies, std::move(l), std::move(r)); }
  static FormulaPtr iff(FormulaPtr l, FormulaPtr r) { return binary(FormulaKind::Iff, std::move(l), std::move(r)); }
  static FormulaPtr quantifier(FormulaKind kind, std::string var, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->name = std::move(var);
    f->a = std::move(body);
    return f;
  }
  static FormulaPtr forall(std::string var, FormulaPtr body) {
    return quantifier(FormulaKind::ForAll, std::move(var), std::move(body));
  }
  static FormulaPtr exists(std::string var, FormulaPtr body) {
    return quantifier(FormulaKind::Exists, std::move(var), std::move(body));
  }
};

inline bool equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::Compare:
      return a.rel == b.rel && equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
    case FormulaKind::PredAtom: {
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); ++i)
        if (!equal(*a.args[i], *b.args[i])) return false;
      return true;
    }
    case FormulaKind::Not:
      return equal(*a.a, *b.a);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      return equal(*a.a, *b.a) && equal(*a.b, *b.b);
    case FormulaKind::ForAll:
    case FormulaKind::Exists:
      return a.name == b.name && equal(*a.a, *b.a);
  }
  return false;
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return equal(*a, *b);
}

// ------------------------------------------------------------ signature

enum class SymbolKind { Function, Predicate };

struct SymbolInfo {
  std::string name;
  int arity = 0;  // arity 0 = constant / propositional atom
  SymbolKind kind = SymbolKind::Function;

  bool operator==(const SymbolInfo&) const = default;
};

// Symbols in order of first appearance in the theory text. That order is
// load-bearing: it fixes the solver's cell ordering and with it the
// enumeration order of models.
class Signature {
 public:
  const std::vector<SymbolInfo>& symbols() const { return symbols_; }
  bool empty() const { return symbols_.empty(); }
  size_t size() const { return symbols_.size(); }

  int index_of(std::string_view name) const {
    for (size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i].name == name) return static_cast<int>(i);
    return -1;
  }
  const SymbolInfo* find(std::string_view name) const {
    int i = index_of(name);
    return i < 0 ? nullptr : &symbols_[i];
  }

  // Registers a use of `name`; conflicting kind or arity is an error.
  void declare(std::string_view name, int arity, SymbolKind kind) {
    if (const SymbolInfo* s = find(name)) {
      if (s->kind != kind)
        throw ArityConflict("symbol '" + std::string(name) +
                            "' used as both function and predicate");
      if (s->arity != arity)
        throw ArityConflict("symbol '" + std::string(name) + "' used at arity " +
                            std::to_string(arity) + " and " + std::to_string(s->arity));
      return;
    }
    symbols_.push_back({std::string(name), arity, kind});
  }

  // Union of two signatures; throws ArityConflict on any clash.
  void merge_from(const Signature& other) {
    for (const SymbolInfo& s : other.symbols_) declare(s.name, s.arity, s.kind);
  }

  bool operator==(const Signature&) const = default;

 private:
  std::vector<SymbolInfo> symbols_;
};

namespace detail {

inline void collect_symbols(const Term& t, Signature& sig) {
  if (t.kind == TermKind::Apply) {
    sig.declare(t.name, static_cast<int>(t.args.size()), SymbolKind::Function);
  }
  for (const TermPtr& a : t.args) collect_symbols(*a, sig);
}

inline void collect_symbols(const Formula& f, Signature& sig) {
  switch (f.kind) {
    case FormulaKind::Compare:
      collect_symbols(*f.lhs, sig);
      collect_symbols(*f.rhs, sig);
      break;
    case FormulaKind::PredAtom:
      sig.declare(f.name, static_cast<int>(f.args.size()), SymbolKind::Predicate);
      for (const TermPtr& a : f.args) collect_symbols(*a, sig);
      break;
    case FormulaKind::Not:
    case FormulaKind::ForAll:
    case FormulaKind::Exists:
      collect_symbols(*f.a, sig);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      collect_symbols(*f.a, sig);
      collect_symbols(*f.b, sig);
      break;
  }
}

}  // namespace detail

inline Signature infer_signature(std::span<const FormulaPtr> formulas) {
  Signature sig;
  for (const FormulaPtr& f : formulas) detail::collect_symbols(*f, sig);
  return sig;
}

// ---------------------------------------------------------- model counts

struct ModelCount {
  unsigned long long count = 0;
  bool exhausted = true;  // false when a max_models limit cut the run short
};

inline constexpr long long kNoLimit = -1;

// --------------------------------------------------------------- theory

struct Theory {
  // Elements are 0..domain_size-1. Constraint-only fragments (favorable
  // files without assign directives) leave it unset until merged.
  std::optional<int> domain_size;
  long long max_models = -1;  // -1 = enumerate everything
  std::vector<FormulaPtr> formulas;
  Signature signature;

  int required_domain_size() const {
    if (!domain_size) throw Error("theory has no domain_size");
    return *domain_size;
  }
};

inline bool equal(const Theory& a, const Theory& b) {
  if (a.domain_size != b.domain_size || a.max_models != b.max_models) return false;
  if (!(a.signature == b.signature)) return false;
  if (a.formulas.size() != b.formulas.size()) return false;
  for (size_t i = 0; i < a.formulas.size(); ++i)
    if (!equal(a.formulas[i], b.formulas[i])) return false;
  return true;
}

// Convenience for tests and programmatic construction.
inline Theory make_theory(int domain_size, std::vector<FormulaPtr> formulas,
                          long long max_models = -1) {
  Theory th;
  th.domain_size = domain_size;
  th.max_models = max_models;
  th.signature = infer_signature(formulas);
  th.formulas = std::move(formulas);
  return th;
}

// --------------------------------------------------- interpretations

// Flat layout of every table cell of a signature at a fixed domain size.
// Cells are grouped per symbol in signature order; within one symbol the
// argument tuples run in row-major (lexicographic) order.
struct TableLayout {
  int domain_size = 1;
  std::vector<SymbolInfo> symbols;
  std::vector<size_t> offset;      // per symbol, start into the flat vector
  std::vector<size_t> table_size;  // per symbol, domain_size^arity
  size_t total_cells = 0;

  static std::shared_ptr<const TableLayout> make(const Signature& sig, int domain_size) {
    if (domain_size < 1) throw Error("domain_size must be >= 1");
    auto lay = std::make_shared<TableLayout>();
    lay->domain_size = domain_size;
    lay->symbols = sig.symbols();
    for (const SymbolInfo& s : lay->symbols) {
      size_t sz = 1;
      for (int k = 0; k < s.arity; ++k) sz *= static_cast<size_t>(domain_size);
      lay->offset.push_back(lay->total_cells);
      lay->table_size.push_back(sz);
      lay->total_cells += sz;
    }
    return lay;
  }

  int symbol_index(std::string_view name) const {
    for (size_t i = 0; i < symbols.size(); ++i)
      if (symbols[i].name == name) return static_cast<int>(i);
    return -1;
  }

  size_t cell_index(int symbol, std::span<const int> args) const {
    size_t idx = 0;
    for (int v : args) idx = idx * static_cast<size_t>(domain_size) + static_cast<size_t>(v);
    return offset[static_cast<size_t>(symbol)] + idx;
  }

  // Inverse of cell_index: which symbol and argument tuple a flat cell is.
  std::pair<int, std::vector<int>> decode(size_t cell) const {
    size_t sym = 0;
    while (sym + 1 < symbols.size() && offset[sym + 1] <= cell) ++sym;
    size_t local = cell - offset[sym];
    std::vector<int> args(static_cast<size_t>(symbols[sym].arity));
    for (int k = symbols[sym].arity - 1; k >= 0; --k) {
      args[static_cast<size_t>(k)] = static_cast<int>(local % static_cast<size_t>(domain_size));
      local /= static_cast<size_t>(domain_size);
    }
    return {static_cast<int>(sym), std::move(args)};
  }

  bool matches(const Signature& sig) const { return symbols == sig.symbols(); }
};

// One candidate model: a total table for every symbol. Function cells
// hold 0..n-1, predicate cells hold 0 or 1.
struct Interpretation {
  std::shared_ptr<const TableLayout> layout;
  std::vector<int> cells;

  static Interpretation zeros(std::shared_ptr<const TableLayout> lay) {
    Interpretation i;
    i.cells.assign(lay->total_cells, 0);
    i.layout = std::move(lay);
    return i;
  }

  int function_value(std::string_view name, std::span<const int> args) const {
    return cells[checked_cell(name, args, SymbolKind::Function)];
  }
  bool predicate_value(std::string_view name, std::span<const int> args) const {
    return cells[checked_cell(name, args, SymbolKind::Predicate)] != 0;
  }
  void set(std::string_view name, std::span<const int> args, int value) {
    int sym = layout->symbol_index(name);
    if (sym < 0) throw SignatureMismatch("unknown symbol '" + std::string(name) + "'");
    cells[layout->cell_index(sym, args)] = value;
  }

  bool operator==(const Interpretation& other) const {
    return (layout == other.layout || layout->symbols == other.layout->symbols) &&
           layout->domain_size == other.layout->domain_size && cells == other.cells;
  }

 private:
  size_t checked_cell(std::string_view name, std::span<const int> args, SymbolKind kind) const {
    int sym = layout->symbol_index(name);
    if (sym < 0) throw SignatureMismatch("unknown symbol '" + std::string(name) + "'");
    const SymbolInfo& info = layout->symbols[static_cast<size_t>(sym)];
    if (info.kind != kind || info.arity != static_cast<int>(args.size()))
      throw SignatureMismatch("symbol '" + std::string(name) + "' used with wrong kind or arity");
    for (int v : args)
      if (v < 0 || v >= layout->domain_size)
        throw OutOfDomainApplication("argument " + std::to_string(v) + " of '" +
                                     std::string(name) + "' outside 0.." +
                                     std::to_string(layout->domain_size - 1));
    return layout->cell_index(sym, args);
  }
};

// ------------------------------------------------------------- bindings

// Variable environment with stack discipline; the most recent binding of
// a name shadows earlier ones. Popped slots keep their string capacity
// so the bind/unbind churn of quantifier evaluation never allocates in
// steady state.
class Binding {
 public:
  void bind(std::string_view name, int value) {
    if (size_ < entries_.size()) {
      entries_[size_].first = name;
      entries_[size_].second = value;
    } else {
      entries_.emplace_back(std::string(name), value);
    }
    ++size_;
  }
  void unbind() { --size_; }
  size_t depth() const { return size_; }

  // Changes the value of the innermost binding; quantifier loops rebind
  // the same variable domain_size times.
  void rebind_last(int value) { entries_[size_ - 1].second = value; }

  const int* lookup(std::string_view name) const {
    for (size_t i = size_; i-- > 0;)
      if (entries_[i].first == name) return &entries_[i].second;
    return nullptr;
  }

 private:
  std::vector<std::pair<std::string, int>> entries_;
  size_t size_ = 0;
};

// ------------------------------------------------------- free variables

namespace detail {

inline void free_vars_term(const Term& t, const std::vector<std::string_view>& bound,
                           std::set<std::string>& out) {
  switch (t.kind) {
    case TermKind::Variable:
      for (std::string_view b : bound)
        if (b == t.name) return;
      out.insert(t.name);
      return;
    case TermKind::IntLiteral:
      return;
    case TermKind::Apply:
    case TermKind::ArithOp:
      for (const TermPtr& a : t.args) free_vars_term(*a, bound, out);
      return;
  }
}

inline void free_vars_formula(const Formula& f, std::vector<std::string_view>& bound,
                              std::set<std::string>& out) {
  switch (f.kind) {
    case FormulaKind::Compare:
      free_vars_term(*f.lhs, bound, out);
      free_vars_term(*f.rhs, bound, out);
      return;
    case FormulaKind::PredAtom:
      for (const TermPtr& a : f.args) free_vars_term(*a, bound, out);
      return;
    case FormulaKind::Not:
      free_vars_formula(*f.a, bound, out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      free_vars_formula(*f.a, bound, out);
      free_vars_formula(*f.b, bound, out);
      return;
    case FormulaKind::ForAll:
    case FormulaKind::Exists:
      bound.push_back(f.name);
      free_vars_formula(*f.a, bound, out);
      bound.pop_back();
      return;
  }
}

}  // namespace detail

inline std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  std::vector<std::string_view> bound;
  detail::free_vars_formula(f, bound, out);
  return out;
}

}  // namespace laplace
