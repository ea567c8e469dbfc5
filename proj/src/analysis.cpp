#include "qfp/analysis.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace qfp {

const char* kindName(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Equality: return "equality";
    case ConstraintKind::Difference: return "difference";
    case ConstraintKind::Utvpi: return "utvpi";
    case ConstraintKind::General: return "general";
  }
  return "?";
}

const char* domainName(DomainKind k) { return k == DomainKind::Signed ? "signed" : "unsigned"; }

const char* formulaName(BoundFormula f) {
  switch (f) {
    case BoundFormula::EqualityN: return "equality-n";
    case BoundFormula::DifferenceGraph: return "difference-graph";
    case BoundFormula::UtvpiDouble: return "utvpi-double";
    case BoundFormula::GeneralLinear: return "general";
    case BoundFormula::Empty: return "empty";
  }
  return "?";
}

//===----------------------------------------------------------------------===//
// Classification and partitioning
//===----------------------------------------------------------------------===//

AtomShape classifyConstraint(const LinearAtom& a) {
  AtomShape shape;
  shape.width = a.width();
  bool unit = true;
  int positives = 0;
  for (const auto& [v, c] : a.coeffs) {
    BigInt mag = absValue(c);
    if (mag > shape.rowMaxCoeff) shape.rowMaxCoeff = mag;
    if (mag != 1) unit = false;
    if (c > 0) ++positives;
  }
  if (!unit || shape.width > 2) {
    shape.kind = ConstraintKind::General;
  } else if (shape.width == 1) {
    shape.kind = ConstraintKind::Difference;
  } else if (positives == 1) {
    shape.kind = (a.bound == 0 || a.bound == 1) ? ConstraintKind::Equality
                                                : ConstraintKind::Difference;
  } else {
    shape.kind = ConstraintKind::Utvpi;
  }
  return shape;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Keeps the smaller index as root so roots are the minimal members.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<VariableClass> partitionClasses(std::span<const LinearAtom> atoms) {
  std::vector<VarId> vars;
  for (const auto& a : atoms)
    for (const auto& [v, c] : a.coeffs) vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  auto indexOf = [&](VarId v) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  };

  UnionFind uf(vars.size());
  for (const auto& a : atoms) {
    std::size_t first = indexOf(a.coeffs.begin()->first);
    for (const auto& [v, c] : a.coeffs) uf.unite(first, indexOf(v));
  }

  std::map<std::size_t, std::size_t> classByRoot;  // root index -> class slot
  std::vector<VariableClass> classes;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::size_t root = uf.find(i);
    auto [it, inserted] = classByRoot.emplace(root, classes.size());
    if (inserted) classes.emplace_back();
    classes[it->second].variables.push_back(vars[i]);
  }
  for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
    VariableClass& c = classes[classByRoot.at(uf.find(indexOf(atoms[ai].coeffs.begin()->first)))];
    c.atoms.push_back(ai);
    c.kind = std::max(c.kind, classifyConstraint(atoms[ai]).kind);
  }
  return classes;
}

//===----------------------------------------------------------------------===//
// Parameters and bounds
//===----------------------------------------------------------------------===//

ClassParameters classParameters(const VariableClass& c, std::span<const LinearAtom> atoms) {
  ClassParameters p;
  p.n = c.variables.size();
  p.m = c.atoms.size();
  for (std::size_t ai : c.atoms) {
    const LinearAtom& a = atoms[ai];
    AtomShape shape = classifyConstraint(a);
    p.w = std::max(p.w, shape.width);
    p.aMax = std::max(p.aMax, shape.rowMaxCoeff);
    BigInt b = absValue(a.bound);
    p.bMax = std::max(p.bMax, b);
    p.constants.push_back(b);
    if (isNonDifference(shape.kind)) {
      ++p.kUncapped;
      p.rowMaxCoeffs.push_back(shape.rowMaxCoeff);
      p.rowWidths.push_back(shape.width);
    }
  }
  p.k = std::min(p.kUncapped, p.n + 1);
  if (p.k > 0) p.w = std::max<std::size_t>(p.w, 2);
  p.s = std::min(p.n + 1, p.m);
  return p;
}

unsigned bitWidthFor(DomainKind domain, const BigInt& d) {
  unsigned bits = bitLength(d);
  if (domain == DomainKind::Signed) return bits + 1;
  return std::max(bits, 1u);
}

namespace {

BigInt power(BigInt base, std::size_t exp) {
  BigInt result = 1;
  while (exp) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

// (aMax * w)^k, or the product of the k largest row products.
BigInt coefficientFactor(const ClassParameters& p, bool optimized) {
  if (!optimized || p.rowMaxCoeffs.size() < p.k) return power(p.aMax * p.w, p.k);
  std::vector<BigInt> products;
  for (std::size_t i = 0; i < p.rowMaxCoeffs.size(); ++i)
    products.push_back(p.rowMaxCoeffs[i] * p.rowWidths[i]);
  std::sort(products.begin(), products.end(), std::greater<>());
  BigInt result = 1;
  for (std::size_t i = 0; i < p.k; ++i) result *= products[i];
  return result;
}

// s * (bMax + 1), or the sum of the s largest (|b| + 1).
BigInt constantFactor(const ClassParameters& p, bool optimized) {
  if (!optimized || p.constants.size() < p.s) return BigInt(p.s) * (p.bMax + 1);
  std::vector<BigInt> sorted = p.constants;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  BigInt sum = 0;
  for (std::size_t i = 0; i < p.s; ++i) sum += sorted[i] + 1;
  return sum;
}

}  // namespace

BoundReport computeBound(const ClassParameters& p, ConstraintKind kind,
                         const OptimizationFlags& opts) {
  BoundReport r;
  if (p.m == 0) {
    r.formula = BoundFormula::Empty;
    r.domain = DomainKind::Unsigned;
    r.d = 0;
    r.bitWidth = 1;
    return r;
  }
  const BigInt minNM = std::min(p.n, p.m);
  switch (kind) {
    case ConstraintKind::Equality:
      r.formula = BoundFormula::EqualityN;
      r.domain = DomainKind::Unsigned;
      r.d = p.n;
      break;
    case ConstraintKind::Difference:
      r.formula = BoundFormula::DifferenceGraph;
      r.domain = DomainKind::Unsigned;
      r.d = minNM * (p.bMax + 1);
      break;
    case ConstraintKind::Utvpi:
      r.formula = BoundFormula::UtvpiDouble;
      r.domain = DomainKind::Signed;
      r.d = 2 * minNM * (p.bMax + 1);
      break;
    case ConstraintKind::General: {
      r.formula = BoundFormula::GeneralLinear;
      r.domain = DomainKind::Signed;
      r.coeffApplied = opts.coeff && p.k > 0;
      r.constApplied = opts.constTerms;
      BigInt delta = constantFactor(p, opts.constTerms) * coefficientFactor(p, opts.coeff);
      r.d = BigInt(p.n + 2) * delta;
      break;
    }
  }
  r.bitWidth = bitWidthFor(r.domain, r.d);
  return r;
}

//===----------------------------------------------------------------------===//
// Shift of origin
//===----------------------------------------------------------------------===//

namespace {

struct ShiftObjective {
  BigInt maxAbs = 0;
  BigInt sumAbs = 0;

  bool operator<(const ShiftObjective& o) const {
    if (maxAbs != o.maxAbs) return maxAbs < o.maxAbs;
    return sumAbs < o.sumAbs;
  }
};

ShiftObjective objective(const std::vector<BigInt>& bounds) {
  ShiftObjective o;
  for (const auto& b : bounds) {
    BigInt a = absValue(b);
    o.maxAbs = std::max(o.maxAbs, a);
    o.sumAbs += a;
  }
  return o;
}

// Integer minimizer of the convex function max_i |b_i + a_i * t|.
BigInt minimizeMaxAbs(const std::vector<std::pair<BigInt, BigInt>>& lines) {
  auto g = [&](const BigInt& t) {
    BigInt worst = 0;
    for (const auto& [a, b] : lines) worst = std::max(worst, absValue(b + a * t));
    return worst;
  };
  BigInt reach = 0;
  for (const auto& [a, b] : lines) reach = std::max(reach, absValue(b));
  BigInt lo = -reach - 1;
  BigInt hi = reach + 1;
  // smallest t in [lo, hi] with g(t + 1) >= g(t)
  while (lo < hi) {
    BigInt mid = floorDiv(lo + hi, 2);
    if (g(mid + 1) >= g(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace

ShiftResult shiftOfOrigin(const VariableClass& c, std::span<const LinearAtom> atoms) {
  ShiftResult result;
  for (VarId v : c.variables) result.offsets.emplace(v, 0);
  for (std::size_t ai : c.atoms) result.bounds.push_back(atoms[ai].bound);

  constexpr int kMaxPasses = 100;
  ShiftObjective current = objective(result.bounds);
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool improved = false;
    for (VarId v : c.variables) {
      std::vector<std::pair<BigInt, BigInt>> lines;
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < c.atoms.size(); ++r) {
        auto it = atoms[c.atoms[r]].coeffs.find(v);
        if (it == atoms[c.atoms[r]].coeffs.end()) continue;
        lines.emplace_back(it->second, result.bounds[r]);
        rows.push_back(r);
      }
      if (lines.empty()) continue;
      BigInt step = minimizeMaxAbs(lines);
      if (step == 0) continue;
      std::vector<BigInt> candidate = result.bounds;
      for (std::size_t i = 0; i < rows.size(); ++i) candidate[rows[i]] += lines[i].first * step;
      ShiftObjective next = objective(candidate);
      if (next < current) {
        result.bounds = std::move(candidate);
        result.offsets[v] += step;
        current = next;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return result;
}

//===----------------------------------------------------------------------===//
// Whole-formula analysis
//===----------------------------------------------------------------------===//

std::size_t FormulaAnalysis::widestClass() const {
  std::size_t best = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (best == static_cast<std::size_t>(-1) ||
        classes[i].bound.bitWidth > classes[best].bound.bitWidth)
      best = i;
  return best;
}

FormulaAnalysis analyze(const Formula& nnf, const OptimizationFlags& opts) {
  FormulaAnalysis out;
  out.formula = nnf;
  out.atoms = collectAtoms(nnf);
  std::vector<VariableClass> classes = partitionClasses(out.atoms);

  std::vector<bool> shifted(classes.size(), false);
  if (opts.shift) {
    std::map<LinearAtom, LinearAtom> rewrite;
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
      const VariableClass& c = classes[ci];
      ShiftResult s = shiftOfOrigin(c, out.atoms);
      for (const auto& [v, alpha] : s.offsets) {
        if (alpha == 0) continue;
        out.offsets.emplace(v, alpha);
        shifted[ci] = true;
      }
      if (!shifted[ci]) continue;
      for (std::size_t r = 0; r < c.atoms.size(); ++r) {
        LinearAtom moved = out.atoms[c.atoms[r]];
        moved.bound = s.bounds[r];
        rewrite.emplace(out.atoms[c.atoms[r]], moved);
      }
    }
    if (!rewrite.empty()) {
      out.formula = substituteAtoms(nnf, rewrite);
      for (auto& a : out.atoms) {
        auto it = rewrite.find(a);
        if (it != rewrite.end()) a = it->second;
      }
    }
  }

  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    ClassReport report;
    report.cls = std::move(classes[ci]);
    report.params = classParameters(report.cls, out.atoms);
    report.bound = computeBound(report.params, report.cls.kind, opts);
    report.bound.shiftApplied = shifted[ci];
    if (report.cls.kind == ConstraintKind::Difference) {
      for (std::size_t ai : report.cls.atoms)
        if (out.atoms[ai].width() == 1) report.zeroAnchor = true;
    }
    for (VarId v : report.cls.variables) out.classOf.emplace(v, ci);
    out.classes.push_back(std::move(report));
  }
  return out;
}

}  // namespace qfp
