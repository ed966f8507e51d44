// Brute-force ground truth: sweep every assignment of every table cell
// and test each candidate with the core satisfaction check. No
// grounding, no propagation, no pruning — this path shares nothing with
// the solver except the AST and its semantics, so a bug in the grounder
// cannot hide behind an identical bug here.
#pragma once

#include <thread>
#include <vector>

#include "laplace/ast.hpp"
#include "laplace/eval.hpp"

namespace laplace {

struct OracleBudget {
  unsigned long long max_assignments = 10'000'000;
};

namespace detail {

inline std::string u128_to_string(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

struct SweepSetup {
  std::shared_ptr<const TableLayout> layout;
  std::vector<int> cell_size;
  unsigned __int128 space = 1;

  SweepSetup(const Theory& th, const OracleBudget& budget) {
    layout = TableLayout::make(th.signature, th.required_domain_size());
    cell_size.reserve(layout->total_cells);
    bool overflow = false;
    for (size_t c = 0; c < layout->total_cells; ++c) {
      auto [sym, args] = layout->decode(c);
      (void)args;
      int size = layout->symbols[static_cast<size_t>(sym)].kind == SymbolKind::Function
                     ? layout->domain_size
                     : 2;
      cell_size.push_back(size);
      unsigned __int128 next = space * static_cast<unsigned __int128>(size);
      if (next / static_cast<unsigned __int128>(size) != space) overflow = true;
      space = next;
    }
    if (overflow || space > budget.max_assignments)
      throw BudgetExceeded("assignment space of " +
                           (overflow ? std::string("more than 2^128") : u128_to_string(space)) +
                           " exceeds the oracle budget of " +
                           std::to_string(budget.max_assignments));
  }

  // Cell 0 is the most significant digit, so index order coincides with
  // lexicographic order of the cell-value vector.
  void decode(unsigned long long index, std::vector<int>& vals) const {
    for (size_t c = cell_size.size(); c-- > 0;) {
      vals[c] = static_cast<int>(index % static_cast<unsigned long long>(cell_size[c]));
      index /= static_cast<unsigned long long>(cell_size[c]);
    }
  }

  bool advance(std::vector<int>& vals) const {
    for (size_t c = cell_size.size(); c-- > 0;) {
      if (++vals[c] < cell_size[c]) return true;
      vals[c] = 0;
    }
    return false;
  }
};

inline unsigned long long sweep_count_range(const Theory& th, const SweepSetup& setup,
                                            unsigned long long lo, unsigned long long hi) {
  Interpretation interp;
  interp.layout = setup.layout;
  interp.cells.assign(setup.layout->total_cells, 0);
  setup.decode(lo, interp.cells);
  Binding scratch;
  unsigned long long found = 0;
  for (unsigned long long i = lo; i < hi; ++i) {
    if (satisfies_all(th, interp, scratch)) ++found;
    setup.advance(interp.cells);
  }
  return found;
}

}  // namespace detail

// Would a brute-force sweep of this theory fit a given budget?
inline bool oracle_within_budget(const Theory& th, OracleBudget budget = {}) {
  try {
    detail::SweepSetup probe(th, budget);
    return true;
  } catch (const BudgetExceeded&) {
    return false;
  }
}

// Exact count by exhaustive sweep. The sweep is embarrassingly
// parallel: it is split into disjoint contiguous index ranges and the
// count is their plain sum, identical under any schedule.
inline ModelCount brute_force_count(const Theory& th, OracleBudget budget = {}) {
  detail::SweepSetup setup(th, budget);
  const auto space = static_cast<unsigned long long>(setup.space);

  // Validate the signature check once; every swept candidate shares the
  // same layout.
  {
    Interpretation probe;
    probe.layout = setup.layout;
    probe.cells.assign(setup.layout->total_cells, 0);
    check_signature(th, probe);
  }

  unsigned hw = std::thread::hardware_concurrency();
  unsigned workers = hw == 0 ? 1 : hw;
  if (workers > 8) workers = 8;
  if (space < 100'000 || workers == 1) {
    return {detail::sweep_count_range(th, setup, 0, space), true};
  }

  std::vector<unsigned long long> partial(workers, 0);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    unsigned long long lo = space / workers * w + std::min<unsigned long long>(w, space % workers);
    unsigned long long len = space / workers + (w < space % workers ? 1 : 0);
    threads.emplace_back([&, w, lo, len] {
      partial[w] = detail::sweep_count_range(th, setup, lo, lo + len);
    });
  }
  for (std::thread& t : threads) t.join();

  unsigned long long total = 0;
  for (unsigned long long p : partial) total += p;
  return {total, true};
}

// Full model list in ascending lexicographic order of the cell-value
// vector, i.e. the same order the solver's enumeration contract
// specifies. Sequential: callers list models only for small spaces.
inline std::vector<Interpretation> brute_force_models(const Theory& th, OracleBudget budget = {}) {
  detail::SweepSetup setup(th, budget);
  const auto space = static_cast<unsigned long long>(setup.space);

  Interpretation interp;
  interp.layout = setup.layout;
  interp.cells.assign(setup.layout->total_cells, 0);
  check_signature(th, interp);

  Binding scratch;
  std::vector<Interpretation> out;
  for (unsigned long long i = 0; i < space; ++i) {
    if (satisfies_all(th, interp, scratch)) out.push_back(interp);
    setup.advance(interp.cells);
  }
  return out;
}

}  // namespace laplace
