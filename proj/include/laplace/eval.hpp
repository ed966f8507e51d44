// Model-theoretic semantics: term evaluation and Tarskian satisfaction
// of formulas over a finite interpretation.
//
// Arithmetic is ordinary unbounded integer arithmetic, not modular over
// the domain: 6 + 6 + 6 is 18 even when the domain is 0..6. Only the
// arguments of function and predicate applications must stay inside the
// domain; comparison operands may be any integer.
#pragma once

#include <string>

#include "laplace/ast.hpp"

namespace laplace {

namespace detail {

inline long long eval_term_impl(const Term& t, const Interpretation& interp,
                                const Binding& binding) {
  switch (t.kind) {
    case TermKind::Variable: {
      const int* v = binding.lookup(t.name);
      if (!v) throw Error("unbound variable '" + t.name + "'");
      return *v;
    }
    case TermKind::IntLiteral:
      return t.value;
    case TermKind::ArithOp: {
      long long l = eval_term_impl(*t.args[0], interp, binding);
      long long r = eval_term_impl(*t.args[1], interp, binding);
      switch (t.op) {
        case ArithKind::Add: return l + r;
        case ArithKind::Sub: return l - r;
        case ArithKind::Mul: return l * r;
      }
      return 0;
    }
    case TermKind::Apply: {
      const TableLayout& lay = *interp.layout;
      int sym = lay.symbol_index(t.name);
      if (sym < 0) throw SignatureMismatch("unknown symbol '" + t.name + "'");
      const SymbolInfo& info = lay.symbols[static_cast<size_t>(sym)];
      if (info.kind != SymbolKind::Function)
        throw SignatureMismatch("predicate '" + t.name + "' used as a function");
      if (info.arity != static_cast<int>(t.args.size()))
        throw SignatureMismatch("'" + t.name + "' applied at wrong arity");
      size_t idx = 0;
      for (const TermPtr& arg : t.args) {
        long long v = eval_term_impl(*arg, interp, binding);
        if (v < 0 || v >= lay.domain_size)
          throw OutOfDomainApplication("'" + t.name + "' applied to " + std::to_string(v) +
                                       ", outside 0.." + std::to_string(lay.domain_size - 1));
        idx = idx * static_cast<size_t>(lay.domain_size) + static_cast<size_t>(v);
      }
      return interp.cells[lay.offset[static_cast<size_t>(sym)] + idx];
    }
  }
  return 0;
}

inline bool compare_values(CompareOp rel, long long l, long long r) {
  switch (rel) {
    case CompareOp::Eq: return l == r;
    case CompareOp::Ne: return l != r;
    case CompareOp::Lt: return l < r;
    case CompareOp::Le: return l <= r;
    case CompareOp::Gt: return l > r;
    case CompareOp::Ge: return l >= r;
  }
  return false;
}

inline bool holds_impl(const Formula& f, const Interpretation& interp, Binding& binding) {
  switch (f.kind) {
    case FormulaKind::Compare:
      return compare_values(f.rel, eval_term_impl(*f.lhs, interp, binding),
                            eval_term_impl(*f.rhs, interp, binding));
    case FormulaKind::PredAtom: {
      const TableLayout& lay = *interp.layout;
      int sym = lay.symbol_index(f.name);
      if (sym < 0) throw SignatureMismatch("unknown symbol '" + f.name + "'");
      const SymbolInfo& info = lay.symbols[static_cast<size_t>(sym)];
      if (info.kind != SymbolKind::Predicate)
        throw SignatureMismatch("function '" + f.name + "' used as a predicate");
      if (info.arity != static_cast<int>(f.args.size()))
        throw SignatureMismatch("'" + f.name + "' applied at wrong arity");
      size_t idx = 0;
      for (const TermPtr& arg : f.args) {
        long long v = eval_term_impl(*arg, interp, binding);
        if (v < 0 || v >= lay.domain_size)
          throw OutOfDomainApplication("'" + f.name + "' applied to " + std::to_string(v) +
                                       ", outside 0.." + std::to_string(lay.domain_size - 1));
        idx = idx * static_cast<size_t>(lay.domain_size) + static_cast<size_t>(v);
      }
      return interp.cells[lay.offset[static_cast<size_t>(sym)] + idx] != 0;
    }
    case FormulaKind::Not:
      return !holds_impl(*f.a, interp, binding);
    case FormulaKind::And:
      return holds_impl(*f.a, interp, binding) && holds_impl(*f.b, interp, binding);
    case FormulaKind::Or:
      return holds_impl(*f.a, interp, binding) || holds_impl(*f.b, interp, binding);
    case FormulaKind::Implies:
      return !holds_impl(*f.a, interp, binding) || holds_impl(*f.b, interp, binding);
    case FormulaKind::Iff:
      return holds_impl(*f.a, interp, binding) == holds_impl(*f.b, interp, binding);
    case FormulaKind::ForAll: {
      binding.bind(f.name, 0);
      for (int v = 0; v < interp.layout->domain_size; ++v) {
        binding.rebind_last(v);
        if (!holds_impl(*f.a, interp, binding)) {
          binding.unbind();
          return false;
        }
      }
      binding.unbind();
      return true;
    }
    case FormulaKind::Exists: {
      binding.bind(f.name, 0);
      for (int v = 0; v < interp.layout->domain_size; ++v) {
        binding.rebind_last(v);
        if (holds_impl(*f.a, interp, binding)) {
          binding.unbind();
          return true;
        }
      }
      binding.unbind();
      return false;
    }
  }
  return false;
}

}  // namespace detail

inline long long eval_term(const Term& t, const Interpretation& interp,
                           const Binding& binding = {}) {
  return detail::eval_term_impl(t, interp, binding);
}

inline bool holds(const Formula& f, const Interpretation& interp, const Binding& binding) {
  Binding scratch = binding;
  return detail::holds_impl(f, interp, scratch);
}

inline bool holds(const Formula& f, const Interpretation& interp) {
  Binding scratch;
  return detail::holds_impl(f, interp, scratch);
}

// Verifies that the interpretation's tables cover exactly the theory's
// signature at the theory's domain size.
inline void check_signature(const Theory& th, const Interpretation& interp) {
  if (!interp.layout) throw SignatureMismatch("interpretation has no layout");
  if (interp.layout->domain_size != th.required_domain_size())
    throw SignatureMismatch("interpretation domain size " +
                            std::to_string(interp.layout->domain_size) +
                            " differs from theory domain size " +
                            std::to_string(th.required_domain_size()));
  if (!interp.layout->matches(th.signature))
    throw SignatureMismatch("interpretation tables do not match the theory signature");
  if (interp.cells.size() != interp.layout->total_cells)
    throw SignatureMismatch("interpretation tables are not total");
}

// Satisfaction of every formula, without the signature check. Exposed so
// sweeps over many interpretations of one fixed layout can hoist the
// check and reuse a binding scratch buffer.
inline bool satisfies_all(const Theory& th, const Interpretation& interp, Binding& scratch) {
  for (const FormulaPtr& f : th.formulas)
    if (!detail::holds_impl(*f, interp, scratch)) return false;
  return true;
}

inline bool is_model(const Theory& th, const Interpretation& interp) {
  check_signature(th, interp);
  Binding scratch;
  return satisfies_all(th, interp, scratch);
}

}  // namespace laplace
