// The two-pass probability computation: count all models of the
// "possible" theory, count the models with the favorable constraints
// added, and report the exact ratio. Laplace's classical definition,
// nothing more.
#pragma once

#include <cstdio>
#include <numeric>
#include <string>

#include "laplace/ast.hpp"
#include "laplace/parser.hpp"
#include "laplace/solver.hpp"

namespace laplace {

// Exact probability as a reduced fraction.
struct Rational {
  unsigned long long num = 0;
  unsigned long long den = 1;

  bool operator==(const Rational&) const = default;
};

inline Rational reduce(Rational r) {
  if (r.den == 0) throw Error("rational with zero denominator");
  if (r.num == 0) return {0, 1};
  unsigned long long g = std::gcd(r.num, r.den);
  return {r.num / g, r.den / g};
}

// Decimal rendering with 6 significant digits, for display only.
inline std::string decimal_string(Rational r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6Lg",
                static_cast<long double>(r.num) / static_cast<long double>(r.den));
  return buf;
}

struct PuzzleOutcome {
  ModelCount possible;
  ModelCount favorable;
  Rational probability;  // favorable.count / possible.count, reduced
  std::string decimal;   // 6 significant digits
};

// Runs both counting passes. The favorable theory is a constraint
// fragment merged on top of the possible theory, exactly as the puzzle
// corpus ships it.
inline PuzzleOutcome solve_puzzle(const Theory& possible, const Theory& favorable_extra) {
  if (possible.max_models != -1 || favorable_extra.max_models != -1)
    throw NonExhaustiveCount("probabilities need exhaustive counts; set max_models to -1");

  Theory merged = merge_theories(possible, favorable_extra);

  PuzzleOutcome out;
  out.possible = count_models(possible);
  if (!out.possible.exhausted)
    throw NonExhaustiveCount("possible-model count was cut short");
  if (out.possible.count == 0)
    throw ZeroPossibleModels("the possible theory has no models; the encoding is inconsistent");

  out.favorable = count_models(merged);
  if (!out.favorable.exhausted)
    throw NonExhaustiveCount("favorable-model count was cut short");
  if (out.favorable.count > out.possible.count)
    throw Error("favorable count " + std::to_string(out.favorable.count) +
                " exceeds possible count " + std::to_string(out.possible.count) +
                "; favorable constraints must determine any symbols they introduce");

  out.probability = reduce({out.favorable.count, out.possible.count});
  out.decimal = decimal_string(out.probability);
  return out;
}

}  // namespace laplace
