#pragma once

// Seeded random formulas and CNFs shared by the unit and acceptance tests.

#include "qfp/analysis.hpp"
#include "qfp/encoder.hpp"
#include "qfp/formula.hpp"
#include "qfp/oracle.hpp"

#include <random>
#include <set>
#include <vector>

namespace qfp::fuzz {

struct InstanceShape {
  std::size_t maxVars = 4;
  std::size_t maxAtoms = 8;
  int maxCoeff = 3;
  int maxConst = 8;
  unsigned maxDepth = 3;
};

class InstanceGen {
 public:
  explicit InstanceGen(std::uint64_t seed, InstanceShape shape = {}) : rng_(seed), shape_(shape) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// Arbitrary linear atoms of width 1..3.
  LinearAtom mixedAtom(std::size_t n) {
    LinearAtom a;
    std::size_t width = static_cast<std::size_t>(uniform(1, static_cast<int>(std::min<std::size_t>(n, 3))));
    while (a.coeffs.size() < width) {
      int c = 0;
      while (c == 0) c = uniform(-shape_.maxCoeff, shape_.maxCoeff);
      a.coeffs[static_cast<VarId>(uniform(0, static_cast<int>(n) - 1))] = c;
    }
    a.bound = uniform(-shape_.maxConst, shape_.maxConst);
    return a;
  }

  /// x_i - x_j >= b or +-x_i >= b.
  LinearAtom differenceAtom(std::size_t n) {
    LinearAtom a;
    VarId i = static_cast<VarId>(uniform(0, static_cast<int>(n) - 1));
    if (n == 1 || uniform(0, 3) == 0) {
      a.coeffs[i] = uniform(0, 1) ? 1 : -1;
    } else {
      VarId j = i;
      while (j == i) j = static_cast<VarId>(uniform(0, static_cast<int>(n) - 1));
      a.coeffs[i] = 1;
      a.coeffs[j] = -1;
    }
    a.bound = uniform(-shape_.maxConst, shape_.maxConst);
    return a;
  }

  /// Boolean skeleton over freshly drawn leaves, with occasional negations.
  template <class Leaf>
  Formula skeleton(unsigned depth, Leaf&& leaf) {
    if (depth == 0 || uniform(0, 3) == 0) {
      Formula f = leaf();
      return uniform(0, 4) == 0 ? Formula::negation(f) : f;
    }
    std::vector<Formula> kids;
    int width = uniform(2, 3);
    for (int i = 0; i < width; ++i) kids.push_back(skeleton(depth - 1, leaf));
    Formula f = uniform(0, 1) ? Formula::conjunction(kids) : Formula::disjunction(kids);
    return uniform(0, 5) == 0 ? Formula::negation(f) : f;
  }

  /// Normalized formula (Not nodes allowed) over at most maxAtoms distinct atoms.
  Formula mixed() { return build([this](std::size_t n) { return mixedAtom(n); }); }
  Formula differenceOnly() { return build([this](std::size_t n) { return differenceAtom(n); }); }

  /// Equalities and disequalities between variables, normalized.
  Formula equalityOnly() {
    std::size_t n = static_cast<std::size_t>(uniform(2, static_cast<int>(shape_.maxVars)));
    auto leaf = [&] {
      VarId i = static_cast<VarId>(uniform(0, static_cast<int>(n) - 1));
      VarId j = i;
      while (j == i) j = static_cast<VarId>(uniform(0, static_cast<int>(n) - 1));
      RelOp op = uniform(0, 1) ? RelOp::Eq : RelOp::Ne;
      return Formula::relation(op, Term::ofVar(i), Term::ofVar(j));
    };
    return normalize(skeleton(static_cast<unsigned>(uniform(1, static_cast<int>(shape_.maxDepth))), leaf));
  }

  /// Random CNF with clauses of length 1..maxLen.
  Cnf cnf(int vars, int clauses, int maxLen) {
    Cnf c;
    c.numVars = vars;
    for (int i = 0; i < clauses; ++i) {
      std::vector<int> cl;
      int len = uniform(1, maxLen);
      for (int j = 0; j < len; ++j) cl.push_back(uniform(1, vars) * (uniform(0, 1) ? 1 : -1));
      c.clauses.push_back(cl);
    }
    return c;
  }

  /// Uniform k-CNF.
  Cnf kcnf(int vars, int clauses, int k) {
    Cnf c;
    c.numVars = vars;
    for (int i = 0; i < clauses; ++i) {
      std::set<int> used;
      std::vector<int> cl;
      while (static_cast<int>(cl.size()) < k) {
        int v = uniform(1, vars);
        if (!used.insert(v).second) continue;
        cl.push_back(uniform(0, 1) ? v : -v);
      }
      c.clauses.push_back(cl);
    }
    return c;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  template <class MakeAtom>
  Formula build(MakeAtom&& make) {
    std::size_t n = static_cast<std::size_t>(uniform(1, static_cast<int>(shape_.maxVars)));
    std::size_t m = static_cast<std::size_t>(uniform(1, static_cast<int>(shape_.maxAtoms)));
    std::vector<LinearAtom> pool;
    while (pool.size() < m) {
      LinearAtom a = make(n);
      if (std::find(pool.begin(), pool.end(), a) == pool.end()) pool.push_back(a);
    }
    auto leaf = [&] { return Formula::atom(pool[static_cast<std::size_t>(uniform(0, static_cast<int>(m) - 1))]); };
    return skeleton(static_cast<unsigned>(uniform(1, static_cast<int>(shape_.maxDepth))), leaf);
  }

  std::mt19937_64 rng_;
  InstanceShape shape_;
};

/// Box covering the values each variable can take under the analysis:
/// [0, d] for unanchored unsigned classes, [-d, d] otherwise, scaled by `factor`.
inline SearchSpace analysisSpace(const FormulaAnalysis& a, const std::vector<VarId>& vars, int factor) {
  SearchSpace s;
  for (VarId v : vars) {
    auto it = a.classOf.find(v);
    if (it == a.classOf.end()) {
      s.dims.push_back({v, {BigInt(0), BigInt(0)}});
      continue;
    }
    const ClassReport& c = a.classes[it->second];
    BigInt d = c.bound.d * factor;
    bool nonNegative = c.bound.domain == DomainKind::Unsigned && !c.zeroAnchor && factor == 1;
    s.dims.push_back({v, {nonNegative ? BigInt(0) : BigInt(-d), d}});
  }
  return s;
}

/// Exact oracle verdict: enumeration inside the guard, branch and bound beyond it.
inline std::optional<Model> oracleSolve(const Formula& f, const SearchSpace& space) {
  if (space.size() <= kConfigurationGuard) return bruteForceSolve(f, space);
  return boxSolve(f, space, 5'000'000);
}

/// Every point of [lo, hi]^n for n variables 0..n-1.
template <class Fn>
void forEachPoint(std::size_t n, int lo, int hi, Fn&& fn) {
  Model m;
  for (VarId v = 0; v < n; ++v) m[v] = lo;
  for (;;) {
    fn(m);
    VarId v = 0;
    for (; v < n; ++v) {
      if (m[v] < hi) {
        m[v] += 1;
        break;
      }
      m[v] = lo;
    }
    if (v == n) return;
  }
}

/// Calls fn(word, modelMask) over all assignments of a CNF, 64 at a time:
/// variables 1..6 vary inside a word, higher variables follow `word`'s bits.
/// Bit t of modelMask is set iff assignment t of this block satisfies `cnf`.
template <class Fn>
void forEachAssignmentBlock(const Cnf& cnf, Fn&& fn) {
  static const std::uint64_t kPattern[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull,
                                            0xF0F0F0F0F0F0F0F0ull, 0xFF00FF00FF00FF00ull,
                                            0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  const int high = std::max(0, cnf.numVars - 6);
  const std::uint64_t valid = cnf.numVars >= 6 ? ~0ull : ((1ull << (1 << cnf.numVars)) - 1);
  for (std::uint64_t word = 0; word < (1ull << high); ++word) {
    auto value = [&](int lit) {
      int v = std::abs(lit);
      std::uint64_t bits = v <= 6 ? kPattern[v - 1] : (((word >> (v - 7)) & 1) ? ~0ull : 0);
      return lit > 0 ? bits : ~bits;
    };
    std::uint64_t models = valid;
    for (const auto& clause : cnf.clauses) {
      std::uint64_t c = 0;
      for (int lit : clause) c |= value(lit);
      models &= c;
      if (!models) break;
    }
    if (!fn(word, models, value)) return;
  }
}

/// Exhaustive satisfiability check.
inline bool truthTableSat(const Cnf& cnf) {
  bool sat = false;
  forEachAssignmentBlock(cnf, [&](std::uint64_t, std::uint64_t models, auto&&) {
    sat = models != 0;
    return !sat;
  });
  return sat;
}

/// True when every model of `cnf` satisfies `clause`.
inline bool impliesClause(const Cnf& cnf, const std::vector<int>& clause) {
  bool ok = true;
  forEachAssignmentBlock(cnf, [&](std::uint64_t, std::uint64_t models, auto&& value) {
    std::uint64_t c = 0;
    for (int lit : clause) c |= value(lit);
    ok = (models & ~c) == 0;
    return ok;
  });
  return ok;
}

}  // namespace qfp::fuzz
