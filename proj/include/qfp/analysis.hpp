#pragma once

// Constraint classification, variable classes, per-class parameters, and the
// solution/enumeration bounds that fix the bit width of every integer
// variable.

#include "qfp/formula.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace qfp {

/// Ordered from most to least specific: Equality < Difference < Utvpi < General.
enum class ConstraintKind { Equality = 0, Difference = 1, Utvpi = 2, General = 3 };

const char* kindName(ConstraintKind k);

struct AtomShape {
  ConstraintKind kind = ConstraintKind::General;
  std::size_t width = 0;  // variables with nonzero coefficient
  BigInt rowMaxCoeff = 0;  // max |a_ij| in the row
};

/// Equality:   a - b >= 0 or a - b >= 1 (the pieces of =, != after normalization)
/// Difference: a - b >= c or +-a >= c
/// Utvpi:      at most two variables, unit coefficients
AtomShape classifyConstraint(const LinearAtom& a);

/// True for atoms that are not difference constraints (these are counted by k).
inline bool isNonDifference(ConstraintKind k) {
  return k == ConstraintKind::Utvpi || k == ConstraintKind::General;
}

struct VariableClass {
  std::vector<VarId> variables;    // ascending
  std::vector<std::size_t> atoms;  // indices into the atom list, ascending
  ConstraintKind kind = ConstraintKind::Equality;
};

/// Connected components of the variable/atom incidence graph, ordered by
/// smallest member variable.
std::vector<VariableClass> partitionClasses(std::span<const LinearAtom> atoms);

struct ClassParameters {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t kUncapped = 0;
  std::size_t k = 0;  // min(kUncapped, n + 1)
  std::size_t w = 0;
  BigInt aMax = 0;
  BigInt bMax = 0;
  std::size_t s = 0;  // min(n + 1, m)
  std::vector<BigInt> rowMaxCoeffs;  // one per non-difference atom
  std::vector<std::size_t> rowWidths;
  std::vector<BigInt> constants;     // |b_i| for every atom
};

ClassParameters classParameters(const VariableClass& c, std::span<const LinearAtom> atoms);

struct OptimizationFlags {
  bool coeff = false;
  bool constTerms = false;
  bool shift = false;
};

enum class DomainKind { Unsigned, Signed };
enum class BoundFormula { EqualityN, DifferenceGraph, UtvpiDouble, GeneralLinear, Empty };

const char* domainName(DomainKind k);
const char* formulaName(BoundFormula f);

struct BoundReport {
  DomainKind domain = DomainKind::Unsigned;
  BigInt d = 0;
  unsigned bitWidth = 1;
  BoundFormula formula = BoundFormula::Empty;
  bool coeffApplied = false;
  bool constApplied = false;
  bool shiftApplied = false;
};

/// Bits needed for values in [0, d] (Unsigned) or [-d, d] (Signed).
unsigned bitWidthFor(DomainKind domain, const BigInt& d);

BoundReport computeBound(const ClassParameters& p, ConstraintKind kind,
                         const OptimizationFlags& opts);

struct ShiftResult {
  std::map<VarId, BigInt> offsets;  // alpha_j; x_j is replaced by x_j - alpha_j
  std::vector<BigInt> bounds;       // b'_i, aligned with the class atom list
};

/// Integer origin shift reducing max_i |b'_i| with b'_i = b_i + sum_j a_ij alpha_j.
/// Any integer offsets are sound; this is an exact coordinate descent, not an
/// ILP optimum.
ShiftResult shiftOfOrigin(const VariableClass& c, std::span<const LinearAtom> atoms);

/// Result of analysing one normalized NNF formula.
struct ClassReport {
  VariableClass cls;
  ClassParameters params;
  BoundReport bound;
  bool zeroAnchor = false;  // Difference class with single-variable atoms
};

struct FormulaAnalysis {
  Formula formula;                  // possibly shifted
  std::vector<LinearAtom> atoms;    // atoms of `formula`
  std::vector<ClassReport> classes;
  std::map<VarId, BigInt> offsets;  // original x = shifted x - offset
  std::map<VarId, std::size_t> classOf;

  /// Index of the class with the largest bit width, or npos when empty.
  std::size_t widestClass() const;
};

FormulaAnalysis analyze(const Formula& nnf, const OptimizationFlags& opts);

}  // namespace qfp
