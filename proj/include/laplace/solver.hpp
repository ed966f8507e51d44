// Grounding and model enumeration.
//
// A theory is grounded by expanding every quantifier over the domain and
// constant-folding the result. Search then assigns table cells one at a
// time in a fixed static order (symbols in order of first appearance,
// argument tuples in lexicographic order), trying values in ascending
// order, and checks each ground constraint as soon as the last cell it
// reads has been assigned.
//
// There is deliberately no symmetry breaking and no isomorphism
// filtering: the probability method needs raw labeled model counts, and
// any such pruning would destroy them.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "laplace/ast.hpp"
#include "laplace/eval.hpp"

namespace laplace {

// One entry of one symbol's table, the atomic unit of search.
struct Cell {
  int symbol = 0;  // index into the layout's symbol list
  std::vector<int> args;
  SymbolKind kind = SymbolKind::Function;
};

struct GroundConstraint {
  FormulaPtr formula;           // variable- and quantifier-free
  std::vector<uint32_t> cells;  // sorted flat cell indices the formula reads
  uint32_t last_cell = 0;
};

struct GroundProblem {
  std::shared_ptr<const TableLayout> layout;
  std::vector<GroundConstraint> constraints;
  bool trivially_unsat = false;  // some constraint folded to false

  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    out.reserve(layout->total_cells);
    for (size_t c = 0; c < layout->total_cells; ++c) {
      auto [sym, args] = layout->decode(c);
      out.push_back({sym, std::move(args), layout->symbols[static_cast<size_t>(sym)].kind});
    }
    return out;
  }
};

// ------------------------------------------------------------ grounding

namespace detail {

struct FoldResult {
  enum class Tag { True, False, Residual } tag;
  FormulaPtr formula;  // set when tag == Residual

  static FoldResult constant(bool b) { return {b ? Tag::True : Tag::False, nullptr}; }
  static FoldResult residual(FormulaPtr f) { return {Tag::Residual, std::move(f)}; }
};

struct FoldEnv {
  std::vector<std::pair<std::string_view, int>> vars;

  int lookup(std::string_view name) const {
    for (size_t i = vars.size(); i-- > 0;)
      if (vars[i].first == name) return vars[i].second;
    throw Error("unbound variable '" + std::string(name) + "' while grounding");
  }
};

inline TermPtr fold_term(const Term& t, const FoldEnv& env, int domain_size) {
  switch (t.kind) {
    case TermKind::Variable:
      return Term::literal(env.lookup(t.name));
    case TermKind::IntLiteral:
      return Term::literal(t.value);
    case TermKind::ArithOp: {
      TermPtr l = fold_term(*t.args[0], env, domain_size);
      TermPtr r = fold_term(*t.args[1], env, domain_size);
      if (l->kind == TermKind::IntLiteral && r->kind == TermKind::IntLiteral) {
        switch (t.op) {
          case ArithKind::Add: return Term::literal(l->value + r->value);
          case ArithKind::Sub: return Term::literal(l->value - r->value);
          case ArithKind::Mul: return Term::literal(l->value * r->value);
        }
      }
      return Term::arith(t.op, std::move(l), std::move(r));
    }
    case TermKind::Apply: {
      std::vector<TermPtr> args;
      args.reserve(t.args.size());
      for (const TermPtr& a : t.args) {
        TermPtr folded = fold_term(*a, env, domain_size);
        if (folded->kind == TermKind::IntLiteral &&
            (folded->value < 0 || folded->value >= domain_size))
          throw OutOfDomainApplication("'" + t.name + "' applied to " +
                                       std::to_string(folded->value) + ", outside 0.." +
                                       std::to_string(domain_size - 1));
        args.push_back(std::move(folded));
      }
      return Term::apply(t.name, std::move(args));
    }
  }
  return Term::literal(0);
}

// Comparison of a term with itself is decided syntactically; two integer
// literals are decided numerically.
inline FoldResult fold_compare(CompareOp rel, const TermPtr& l, const TermPtr& r) {
  if (l->kind == TermKind::IntLiteral && r->kind == TermKind::IntLiteral)
    return FoldResult::constant(compare_values(rel, l->value, r->value));
  if (equal(l, r)) {
    switch (rel) {
      case CompareOp::Eq:
      case CompareOp::Le:
      case CompareOp::Ge: return FoldResult::constant(true);
      case CompareOp::Ne:
      case CompareOp::Lt:
      case CompareOp::Gt: return FoldResult::constant(false);
    }
  }
  return FoldResult::residual(Formula::compare(rel, l, r));
}

inline FoldResult fold_formula(const Formula& f, FoldEnv& env, int domain_size) {
  using Tag = FoldResult::Tag;
  switch (f.kind) {
    case FormulaKind::Compare:
      return fold_compare(f.rel, fold_term(*f.lhs, env, domain_size),
                          fold_term(*f.rhs, env, domain_size));
    case FormulaKind::PredAtom: {
      std::vector<TermPtr> args;
      args.reserve(f.args.size());
      for (const TermPtr& a : f.args) {
        TermPtr folded = fold_term(*a, env, domain_size);
        if (folded->kind == TermKind::IntLiteral &&
            (folded->value < 0 || folded->value >= domain_size))
          throw OutOfDomainApplication("'" + f.name + "' applied to " +
                                       std::to_string(folded->value) + ", outside 0.." +
                                       std::to_string(domain_size - 1));
        args.push_back(std::move(folded));
      }
      return FoldResult::residual(Formula::pred(f.name, std::move(args)));
    }
    case FormulaKind::Not: {
      FoldResult r = fold_formula(*f.a, env, domain_size);
      if (r.tag == Tag::Residual) return FoldResult::residual(Formula::negate(r.formula));
      return FoldResult::constant(r.tag == Tag::False);
    }
    case FormulaKind::And: {
      FoldResult l = fold_formula(*f.a, env, domain_size);
      if (l.tag == Tag::False) return l;
      FoldResult r = fold_formula(*f.b, env, domain_size);
      if (r.tag == Tag::False) return r;
      if (l.tag == Tag::True) return r;
      if (r.tag == Tag::True) return l;
      return FoldResult::residual(Formula::conj(l.formula, r.formula));
    }
    case FormulaKind::Or: {
      FoldResult l = fold_formula(*f.a, env, domain_size);
      if (l.tag == Tag::True) return l;
      FoldResult r = fold_formula(*f.b, env, domain_size);
      if (r.tag == Tag::True) return r;
      if (l.tag == Tag::False) return r;
      if (r.tag == Tag::False) return l;
      return FoldResult::residual(Formula::disj(l.formula, r.formula));
    }
    case FormulaKind::Implies: {
      FoldResult l = fold_formula(*f.a, env, domain_size);
      if (l.tag == Tag::False) return FoldResult::constant(true);
      FoldResult r = fold_formula(*f.b, env, domain_size);
      if (l.tag == Tag::True) return r;
      if (r.tag == Tag::True) return r;
      if (r.tag == Tag::False) return FoldResult::residual(Formula::negate(l.formula));
      return FoldResult::residual(Formula::implies(l.formula, r.formula));
    }
    case FormulaKind::Iff: {
      FoldResult l = fold_formula(*f.a, env, domain_size);
      FoldResult r = fold_formula(*f.b, env, domain_size);
      if (l.tag != Tag::Residual && r.tag != Tag::Residual)
        return FoldResult::constant(l.tag == r.tag);
      if (l.tag == Tag::True) return r;
      if (r.tag == Tag::True) return l;
      if (l.tag == Tag::False) return FoldResult::residual(Formula::negate(r.formula));
      if (r.tag == Tag::False) return FoldResult::residual(Formula::negate(l.formula));
      return FoldResult::residual(Formula::iff(l.formula, r.formula));
    }
    case FormulaKind::ForAll: {
      std::vector<FormulaPtr> parts;
      for (int v = 0; v < domain_size; ++v) {
        env.vars.emplace_back(f.name, v);
        FoldResult r = fold_formula(*f.a, env, domain_size);
        env.vars.pop_back();
        if (r.tag == Tag::False) return r;
        if (r.tag == Tag::Residual) parts.push_back(std::move(r.formula));
      }
      if (parts.empty()) return FoldResult::constant(true);
      FormulaPtr acc = parts.front();
      for (size_t i = 1; i < parts.size(); ++i) acc = Formula::conj(acc, parts[i]);
      return FoldResult::residual(std::move(acc));
    }
    case FormulaKind::Exists: {
      std::vector<FormulaPtr> parts;
      for (int v = 0; v < domain_size; ++v) {
        env.vars.emplace_back(f.name, v);
        FoldResult r = fold_formula(*f.a, env, domain_size);
        env.vars.pop_back();
        if (r.tag == Tag::True) return r;
        if (r.tag == Tag::Residual) parts.push_back(std::move(r.formula));
      }
      if (parts.empty()) return FoldResult::constant(false);
      FormulaPtr acc = parts.front();
      for (size_t i = 1; i < parts.size(); ++i) acc = Formula::disj(acc, parts[i]);
      return FoldResult::residual(std::move(acc));
    }
  }
  return FoldResult::constant(false);
}

// Flat cell indices a ground term may read. An application whose
// arguments are all literals reads one cell; with a computed argument it
// may read any cell of its table, so all of them are included.
inline void collect_cells_term(const Term& t, const TableLayout& lay,
                               std::vector<uint32_t>& out) {
  if (t.kind == TermKind::ArithOp) {
    collect_cells_term(*t.args[0], lay, out);
    collect_cells_term(*t.args[1], lay, out);
    return;
  }
  if (t.kind != TermKind::Apply) return;
  int sym = lay.symbol_index(t.name);
  if (sym < 0) throw SignatureMismatch("unknown symbol '" + t.name + "' while grounding");
  bool all_literal = true;
  for (const TermPtr& a : t.args) {
    if (a->kind != TermKind::IntLiteral) all_literal = false;
    collect_cells_term(*a, lay, out);
  }
  size_t base = lay.offset[static_cast<size_t>(sym)];
  if (all_literal) {
    size_t idx = 0;
    for (const TermPtr& a : t.args)
      idx = idx * static_cast<size_t>(lay.domain_size) + static_cast<size_t>(a->value);
    out.push_back(static_cast<uint32_t>(base + idx));
  } else {
    for (size_t i = 0; i < lay.table_size[static_cast<size_t>(sym)]; ++i)
      out.push_back(static_cast<uint32_t>(base + i));
  }
}

inline void collect_cells(const Formula& f, const TableLayout& lay, std::vector<uint32_t>& out) {
  switch (f.kind) {
    case FormulaKind::Compare:
      collect_cells_term(*f.lhs, lay, out);
      collect_cells_term(*f.rhs, lay, out);
      return;
    case FormulaKind::PredAtom: {
      int sym = lay.symbol_index(f.name);
      if (sym < 0) throw SignatureMismatch("unknown symbol '" + f.name + "' while grounding");
      bool all_literal = true;
      for (const TermPtr& a : f.args) {
        if (a->kind != TermKind::IntLiteral) all_literal = false;
        collect_cells_term(*a, lay, out);
      }
      size_t base = lay.offset[static_cast<size_t>(sym)];
      if (all_literal) {
        size_t idx = 0;
        for (const TermPtr& a : f.args)
          idx = idx * static_cast<size_t>(lay.domain_size) + static_cast<size_t>(a->value);
        out.push_back(static_cast<uint32_t>(base + idx));
      } else {
        for (size_t i = 0; i < lay.table_size[static_cast<size_t>(sym)]; ++i)
          out.push_back(static_cast<uint32_t>(base + i));
      }
      return;
    }
    case FormulaKind::Not:
      collect_cells(*f.a, lay, out);
      return;
    default:
      collect_cells(*f.a, lay, out);
      collect_cells(*f.b, lay, out);
      return;
  }
}

// Evaluation of ground formulas against the flat cell vector. Only
// called once every cell the formula reads has been assigned.
inline long long geval_term(const Term& t, const TableLayout& lay, const int* vals) {
  switch (t.kind) {
    case TermKind::IntLiteral:
      return t.value;
    case TermKind::ArithOp: {
      long long l = geval_term(*t.args[0], lay, vals);
      long long r = geval_term(*t.args[1], lay, vals);
      switch (t.op) {
        case ArithKind::Add: return l + r;
        case ArithKind::Sub: return l - r;
        case ArithKind::Mul: return l * r;
      }
      return 0;
    }
    case TermKind::Apply: {
      int sym = lay.symbol_index(t.name);
      size_t idx = 0;
      for (const TermPtr& a : t.args) {
        long long v = geval_term(*a, lay, vals);
        if (v < 0 || v >= lay.domain_size)
          throw OutOfDomainApplication("'" + t.name + "' applied to " + std::to_string(v) +
                                       ", outside 0.." + std::to_string(lay.domain_size - 1));
        idx = idx * static_cast<size_t>(lay.domain_size) + static_cast<size_t>(v);
      }
      return vals[lay.offset[static_cast<size_t>(sym)] + idx];
    }
    case TermKind::Variable:
      throw Error("variable in ground formula");
  }
  return 0;
}

inline bool geval(const Formula& f, const TableLayout& lay, const int* vals) {
  switch (f.kind) {
    case FormulaKind::Compare:
      return compare_values(f.rel, geval_term(*f.lhs, lay, vals), geval_term(*f.rhs, lay, vals));
    case FormulaKind::PredAtom: {
      int sym = lay.symbol_index(f.name);
      size_t idx = 0;
      for (const TermPtr& a : f.args) {
        long long v = geval_term(*a, lay, vals);
        if (v < 0 || v >= lay.domain_size)
          throw OutOfDomainApplication("'" + f.name + "' applied to " + std::to_string(v) +
                                       ", outside 0.." + std::to_string(lay.domain_size - 1));
        idx = idx * static_cast<size_t>(lay.domain_size) + static_cast<size_t>(v);
      }
      return vals[lay.offset[static_cast<size_t>(sym)] + idx] != 0;
    }
    case FormulaKind::Not:
      return !geval(*f.a, lay, vals);
    case FormulaKind::And:
      return geval(*f.a, lay, vals) && geval(*f.b, lay, vals);
    case FormulaKind::Or:
      return geval(*f.a, lay, vals) || geval(*f.b, lay, vals);
    case FormulaKind::Implies:
      return !geval(*f.a, lay, vals) || geval(*f.b, lay, vals);
    case FormulaKind::Iff:
      return geval(*f.a, lay, vals) == geval(*f.b, lay, vals);
    default:
      throw Error("quantifier in ground formula");
  }
}

// Splits the top-level conjunctive structure into separate constraints,
// so each piece can be checked as early as possible.
inline void split_conjunction(FormulaPtr f, std::vector<FormulaPtr>& out) {
  if (f->kind == FormulaKind::And) {
    split_conjunction(f->a, out);
    split_conjunction(f->b, out);
    return;
  }
  out.push_back(std::move(f));
}

}  // namespace detail

inline GroundProblem ground(const Theory& th) {
  const int n = th.required_domain_size();
  GroundProblem gp;
  gp.layout = TableLayout::make(th.signature, n);
  if (gp.layout->total_cells > std::numeric_limits<uint32_t>::max())
    throw Error("signature has too many table cells to ground");

  std::vector<FormulaPtr> pieces;
  for (const FormulaPtr& f : th.formulas) {
    detail::FoldEnv env;
    detail::FoldResult r = detail::fold_formula(*f, env, n);
    if (r.tag == detail::FoldResult::Tag::False) {
      gp.trivially_unsat = true;
      gp.constraints.clear();
      return gp;
    }
    if (r.tag == detail::FoldResult::Tag::Residual)
      detail::split_conjunction(std::move(r.formula), pieces);
  }

  for (FormulaPtr& piece : pieces) {
    GroundConstraint gc;
    detail::collect_cells(*piece, *gp.layout, gc.cells);
    std::sort(gc.cells.begin(), gc.cells.end());
    gc.cells.erase(std::unique(gc.cells.begin(), gc.cells.end()), gc.cells.end());
    if (gc.cells.empty()) {
      // No table reads at all; the constraint is decided right here.
      if (!detail::geval(*piece, *gp.layout, nullptr)) {
        gp.trivially_unsat = true;
        gp.constraints.clear();
        return gp;
      }
      continue;
    }
    gc.last_cell = gc.cells.back();
    gc.formula = std::move(piece);
    gp.constraints.push_back(std::move(gc));
  }
  return gp;
}

// ----------------------------------------------------------- search

namespace detail {

struct SearchSetup {
  GroundProblem gp;
  std::vector<int> cell_size;                      // values per cell: n or 2
  std::vector<std::vector<uint32_t>> check_after;  // constraint ids per cell
  long long last_constrained = -1;                 // deepest cell any constraint reads

  explicit SearchSetup(const Theory& th) : gp(ground(th)) {
    const TableLayout& lay = *gp.layout;
    cell_size.reserve(lay.total_cells);
    for (size_t c = 0; c < lay.total_cells; ++c) {
      auto [sym, args] = lay.decode(c);
      (void)args;
      cell_size.push_back(lay.symbols[static_cast<size_t>(sym)].kind == SymbolKind::Function
                              ? lay.domain_size
                              : 2);
    }
    check_after.resize(lay.total_cells);
    for (uint32_t i = 0; i < gp.constraints.size(); ++i) {
      check_after[gp.constraints[i].last_cell].push_back(i);
      last_constrained = std::max(last_constrained,
                                  static_cast<long long>(gp.constraints[i].last_cell));
    }
  }
};

// Depth-first assignment; sink(vals) is called at every full model and
// may return false to stop the search.
template <class Sink>
bool search_rec(const SearchSetup& s, std::vector<int>& vals, size_t depth, Sink&& sink) {
  if (depth == vals.size()) return sink(vals);
  for (int v = 0; v < s.cell_size[depth]; ++v) {
    vals[depth] = v;
    bool ok = true;
    for (uint32_t ci : s.check_after[depth]) {
      if (!geval(*s.gp.constraints[ci].formula, *s.gp.layout, vals.data())) {
        ok = false;
        break;
      }
    }
    if (ok && !search_rec(s, vals, depth + 1, sink)) return false;
  }
  return true;
}

inline unsigned long long mul_saturating(unsigned long long a, unsigned long long b) {
  unsigned long long r;
  if (__builtin_mul_overflow(a, b, &r)) return std::numeric_limits<unsigned long long>::max();
  return r;
}

}  // namespace detail

// Emits every model, one callback per model, in ascending lexicographic
// order of the flat cell-value vector. Deterministic and single-threaded
// by contract. `limit` and the theory's own max_models both cap the
// stream; -1 means no cap.
template <class Sink>
void for_each_model(const Theory& th, long long limit, Sink&& sink) {
  detail::SearchSetup setup(th);
  if (setup.gp.trivially_unsat) return;

  long long cap = -1;
  if (limit >= 0) cap = limit;
  if (th.max_models >= 0) cap = cap < 0 ? th.max_models : std::min(cap, th.max_models);

  long long seen = 0;
  std::vector<int> vals(setup.gp.layout->total_cells, 0);
  if (cap == 0) return;
  detail::search_rec(setup, vals, 0, [&](const std::vector<int>& v) {
    Interpretation m;
    m.layout = setup.gp.layout;
    m.cells = v;
    if (!sink(m)) return false;
    ++seen;
    return cap < 0 || seen < cap;
  });
}

inline std::vector<Interpretation> enumerate_models(const Theory& th, long long limit = kNoLimit) {
  std::vector<Interpretation> out;
  for_each_model(th, limit, [&](const Interpretation& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

// Exact model count without materializing interpretations. Runs of cells
// beyond the last constrained cell contribute a closed-form product.
inline ModelCount count_models(const Theory& th) {
  detail::SearchSetup setup(th);
  ModelCount mc;
  if (setup.gp.trivially_unsat) return mc;

  const long long cap = th.max_models;  // -1 = exhaust
  const size_t total = setup.gp.layout->total_cells;
  const size_t free_from = static_cast<size_t>(setup.last_constrained + 1);

  unsigned long long tail_product = 1;
  for (size_t c = free_from; c < total; ++c)
    tail_product = detail::mul_saturating(tail_product, static_cast<unsigned long long>(setup.cell_size[c]));

  bool hit_limit = false;
  std::vector<int> vals(total, 0);
  if (cap == 0) return mc;

  // Recurse only over the constrained prefix; every completion of an
  // accepted prefix is a model.
  struct Counter {
    const detail::SearchSetup& s;
    std::vector<int>& vals;
    size_t free_from;
    unsigned long long tail_product;
    long long cap;
    unsigned long long count = 0;
    bool hit_limit = false;

    bool add(unsigned long long chunk) {
      unsigned long long room =
          cap < 0 ? std::numeric_limits<unsigned long long>::max() - count
                  : static_cast<unsigned long long>(cap) - count;
      if (chunk >= room && cap >= 0) {
        count = static_cast<unsigned long long>(cap);
        hit_limit = true;
        return false;
      }
      if (cap < 0 && chunk > room) throw Error("model count exceeds 64-bit range");
      count += chunk;
      return true;
    }

    bool rec(size_t depth) {
      if (depth == free_from) return add(tail_product);
      for (int v = 0; v < s.cell_size[depth]; ++v) {
        vals[depth] = v;
        bool ok = true;
        for (uint32_t ci : s.check_after[depth]) {
          if (!detail::geval(*s.gp.constraints[ci].formula, *s.gp.layout, vals.data())) {
            ok = false;
            break;
          }
        }
        if (ok && !rec(depth + 1)) return false;
      }
      return true;
    }
  } counter{setup, vals, free_from, tail_product, cap};

  counter.rec(0);
  mc.count = counter.count;
  hit_limit = counter.hit_limit;
  mc.exhausted = !hit_limit;
  return mc;
}

}  // namespace laplace
