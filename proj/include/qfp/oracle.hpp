#pragma once

// Reference semantics for small instances: exhaustive enumeration over
// bounded integer boxes. Used to produce and check expected verdicts.

#include "qfp/formula.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qfp {

struct Interval {
  BigInt lo;
  BigInt hi;
};

/// Per-variable closed intervals, ordered by variable id.
struct SearchSpace {
  std::vector<std::pair<VarId, Interval>> dims;

  /// Box [lo, hi] for every variable of the formula.
  static SearchSpace uniform(const std::vector<VarId>& vars, const BigInt& lo, const BigInt& hi);
  BigInt size() const;
};

class GuardTripped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kConfigurationGuard = 10'000'000;

/// Lexicographically first model (variable id order, ascending values) of a
/// normalized formula inside `space`. Throws GuardTripped when the space has
/// more than kConfigurationGuard points.
std::optional<Model> bruteForceSolve(const Formula& f, const SearchSpace& space);

/// Some model inside `space`, or none; same verdict as bruteForceSolve but
/// the model is not necessarily the lexicographically first one. Each cube of
/// the formula's DNF is decided exactly by branch and bound over rational LP
/// relaxations with gcd tightening and bound propagation, so boxes far beyond
/// the enumeration guard are fine. Throws GuardTripped once `nodeBudget`
/// search nodes are used.
std::optional<Model> boxSolve(const Formula& f, const SearchSpace& space,
                              std::uint64_t nodeBudget = 1'000'000);

/// Smallest r <= maxRadius with a model in [-r, r]^n, if any.
std::optional<BigInt> minimalModelRadius(const Formula& f, const BigInt& maxRadius);

}  // namespace qfp
