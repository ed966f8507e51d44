// The bundled five-puzzle corpus and its runner. Each case pins the
// published model counts; the runner recomputes them with the solver,
// cross-checks against the brute-force oracle where the assignment
// space fits the oracle budget, and reports pass/fail per case.
#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "laplace/oracle.hpp"
#include "laplace/parser.hpp"
#include "laplace/probability.hpp"

namespace laplace {

struct PuzzleCase {
  std::string name;
  std::string possible_file;
  std::string favorable_file;
  // A second, equivalent favorable encoding that must produce the same
  // count; empty for most cases.
  std::string alt_favorable_file;
  unsigned long long expected_possible = 0;
  unsigned long long expected_favorable = 0;
};

inline const std::vector<PuzzleCase>& builtin_corpus() {
  static const std::vector<PuzzleCase> cases = {
      {"puzzle1_two_decks", "two_decks_all.in", "two_decks_fav.in", "", 2704, 103},
      {"puzzle2_three_dice", "3dice_all.in", "3dice_fav.in", "", 216, 181},
      {"puzzle3_swindler", "3dice_all.in", "swindler_fav.in", "", 216, 91},
      {"puzzle4_socks", "socks_all.in", "socks_fav.in", "", 6, 0},
      {"puzzle5_round_table", "roundtable_all.in", "roundtable_fav.in",
       "roundtable_fav_improved.in", 120, 10},
  };
  return cases;
}

// Oracle verdict for one counting pass.
struct OracleCheck {
  bool attempted = false;
  bool agreed = true;
  unsigned long long count = 0;

  std::string describe() const {
    if (!attempted) return "skipped (over budget)";
    return agreed ? "agreed" : "DISAGREED (" + std::to_string(count) + ")";
  }
};

struct CaseResult {
  std::string name;
  unsigned long long expected_possible = 0;
  unsigned long long expected_favorable = 0;
  ModelCount possible;
  ModelCount favorable;
  Rational probability;
  std::string decimal;
  std::optional<unsigned long long> alt_favorable;  // second encoding's count
  OracleCheck oracle_possible;
  OracleCheck oracle_favorable;
  double elapsed_ms = 0.0;
  bool pass = false;
  std::string failure;  // first mismatch, human-readable
};

struct RunReport {
  std::vector<CaseResult> cases;
  bool all_pass = true;
};

struct CorpusOptions {
  std::string dir = "corpus";
  bool cross_check = true;  // run the oracle wherever it fits the budget
  OracleBudget budget;
};

namespace detail {

inline OracleCheck oracle_check(const Theory& th, unsigned long long solver_count,
                                const OracleBudget& budget) {
  OracleCheck oc;
  if (!oracle_within_budget(th, budget)) return oc;
  oc.attempted = true;
  oc.count = brute_force_count(th, budget).count;
  oc.agreed = oc.count == solver_count;
  return oc;
}

}  // namespace detail

inline CaseResult run_case(const PuzzleCase& pc, const CorpusOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  CaseResult r;
  r.name = pc.name;
  r.expected_possible = pc.expected_possible;
  r.expected_favorable = pc.expected_favorable;

  const std::string base = opts.dir.empty() ? "" : opts.dir + "/";
  Theory possible = load_theory_file(base + pc.possible_file);
  Theory favorable = load_theory_file(base + pc.favorable_file);

  r.possible = count_models(possible);
  Theory merged = merge_theories(possible, favorable);
  r.favorable = count_models(merged);
  r.probability = reduce({r.favorable.count, r.possible.count});
  r.decimal = decimal_string(r.probability);

  if (!pc.alt_favorable_file.empty()) {
    Theory alt = load_theory_file(base + pc.alt_favorable_file);
    r.alt_favorable = count_models(merge_theories(possible, alt)).count;
  }

  if (opts.cross_check) {
    r.oracle_possible = detail::oracle_check(possible, r.possible.count, opts.budget);
    r.oracle_favorable = detail::oracle_check(merged, r.favorable.count, opts.budget);
  }

  r.pass = true;
  auto fail = [&](std::string why) {
    if (r.pass) r.failure = std::move(why);
    r.pass = false;
  };
  if (r.possible.count != pc.expected_possible)
    fail("possible count " + std::to_string(r.possible.count) + " != expected " +
         std::to_string(pc.expected_possible));
  if (r.favorable.count != pc.expected_favorable)
    fail("favorable count " + std::to_string(r.favorable.count) + " != expected " +
         std::to_string(pc.expected_favorable));
  if (r.alt_favorable && *r.alt_favorable != pc.expected_favorable)
    fail("alternative favorable encoding count " + std::to_string(*r.alt_favorable) +
         " != expected " + std::to_string(pc.expected_favorable));
  if (!r.oracle_possible.agreed)
    fail("oracle disagrees on possible count: " + std::to_string(r.oracle_possible.count));
  if (!r.oracle_favorable.agreed)
    fail("oracle disagrees on favorable count: " + std::to_string(r.oracle_favorable.count));

  r.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline RunReport run_corpus_cases(const CorpusOptions& opts = {}) {
  RunReport report;
  for (const PuzzleCase& pc : builtin_corpus()) report.cases.push_back(run_case(pc, opts));
  std::sort(report.cases.begin(), report.cases.end(),
            [](const CaseResult& a, const CaseResult& b) { return a.name < b.name; });
  for (const CaseResult& c : report.cases) report.all_pass = report.all_pass && c.pass;
  return report;
}

}  // namespace laplace
