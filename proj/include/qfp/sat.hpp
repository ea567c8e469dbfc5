#pragma once

#include "qfp/encoder.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfp {

enum class SatStatus { Sat, Unsat };

struct SatResult {
  SatStatus status = SatStatus::Unsat;
  std::vector<bool> assignment;  // index 0 unused; filled when Sat
};

/// The conflict budget ran out before a verdict was reached.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// External solver misbehaved: failed to run, printed nothing parseable, or
/// returned a model that does not satisfy the clauses.
class ExternalSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  std::optional<std::uint64_t> conflictBudget;
  double varDecay = 0.95;
  double clauseDecay = 0.999;
  unsigned restartBase = 64;
  bool recordLearned = false;
};

bool satisfiesAll(const Cnf& cnf, const std::vector<bool>& assignment);

/// CDCL: two watched literals, first-UIP learning with local minimization,
/// VSIDS branching, Luby restarts, phase saving, activity-based clause
/// deletion. Deterministic for a fixed input.
class CdclSolver {
 public:
  explicit CdclSolver(const Cnf& cnf, SolverOptions opts = {});
  ~CdclSolver();
  CdclSolver(const CdclSolver&) = delete;
  CdclSolver& operator=(const CdclSolver&) = delete;

  /// Throws ResourceLimit when the budget is exhausted.
  SatResult solve();

  /// Every clause learned so far (only when recordLearned is set).
  const std::vector<std::vector<int>>& learnedClauses() const;
  std::uint64_t conflicts() const;

 private:
  struct Impl;
  Impl* impl_;
};

SatResult solve(const Cnf& cnf, const SolverOptions& opts = {});

/// Writes the CNF to a temporary DIMACS file and runs `command <file>`.
/// The "s" line is authoritative; exit codes 10/20 only corroborate.
SatResult solveExternal(const Cnf& cnf, const std::string& command);

}  // namespace qfp
