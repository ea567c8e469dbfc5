#pragma once

// End-to-end pipeline behind the qfpsolve subcommands.

#include "qfp/analysis.hpp"
#include "qfp/encoder.hpp"
#include "qfp/parser.hpp"
#include "qfp/sat.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qfp {

enum class Backend { Embedded, External };
enum class Mode { Eager, Iterative };

struct SolveConfig {
  OptimizationFlags opts;
  Backend backend = Backend::Embedded;
  std::string externalCommand;
  Mode mode = Mode::Eager;
  bool ackermann = false;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> conflictBudget;
  bool structuralHashing = true;
};

/// "base", "coeff", "const" or "all"; throws std::invalid_argument otherwise.
OptimizationFlags presetFlags(const std::string& name);

/// Parses "embedded" or "ext:<command>" into the config.
void setBackend(SolveConfig& config, const std::string& text);

/// A problem reduced to a normalized, negation-free, function-free formula.
struct Prepared {
  Problem problem;
  Formula nnf;
};

/// Ackermannizes (when requested), normalizes and converts to NNF. Function
/// applications without `ackermann` are rejected.
Prepared prepare(Problem problem, bool ackermann);

enum class Verdict { Sat, Unsat };

struct SolveOutcome {
  Verdict verdict = Verdict::Unsat;
  Model model;  // every variable of the formula; empty when unsat
  FormulaAnalysis analysis;
  std::vector<unsigned> stageCaps;  // width cap per iterative stage; one entry in eager mode
  std::size_t cnfVars = 0;
  std::size_t cnfClauses = 0;
};

class UnsoundModel : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Decides `nnf`. Every Sat outcome is checked with evaluate before it is
/// returned; a failing check throws UnsoundModel.
SolveOutcome solveFormula(const Formula& nnf, const SolveConfig& config);

/// solveFormula plus the surface-level model check when no functions exist.
SolveOutcome solvePrepared(const Prepared& prepared, const SolveConfig& config);

SatResult runBackend(const Cnf& cnf, const SolveConfig& config);

/// "(define-fun x () Int 3)" lines for the declared variables, sorted by name.
/// Declared variables absent from the model print as 0.
std::string renderModel(const Problem& problem, const Model& model);

std::string renderBoundTable(const FormulaAnalysis& analysis, bool csv);

struct FormulaStats {
  std::string path;
  std::size_t atoms = 0;
  std::size_t nonDifference = 0;
  double fraction = 0;
  std::optional<std::size_t> maxNonDifferenceWidth;
  std::optional<std::string> error;
};

struct CorpusStats {
  std::vector<FormulaStats> files;
  double maxFraction = 0;
  std::optional<std::size_t> maxNonDifferenceWidth;
};

FormulaStats formulaStats(const Formula& nnf);
CorpusStats analyzeCorpus(const std::vector<std::string>& paths);
std::string renderCorpusStats(const CorpusStats& stats, bool csv);

struct GenParams {
  std::size_t n = 4;
  std::size_t m = 8;
  std::size_t k = 0;
  std::size_t w = 3;
  BigInt aMax = 1;
  BigInt bMax = 0;
  std::uint64_t seed = 1;
  unsigned depth = 2;
};

/// SMT-LIB text with exactly m distinct atoms, exactly k of them
/// non-difference constraints of width in [3, w] (at least one of width w).
/// Identical parameters give byte-identical output.
std::string generateFormula(const GenParams& params);

}  // namespace qfp
