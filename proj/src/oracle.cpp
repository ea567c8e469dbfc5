#include "qfp/oracle.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <set>

namespace qfp {

using Rational = boost::multiprecision::cpp_rational;

SearchSpace SearchSpace::uniform(const std::vector<VarId>& vars, const BigInt& lo, const BigInt& hi) {
  SearchSpace s;
  for (VarId v : vars) s.dims.emplace_back(v, Interval{lo, hi});
  return s;
}

BigInt SearchSpace::size() const {
  BigInt total = 1;
  for (const auto& [v, iv] : dims) {
    if (iv.hi < iv.lo) return 0;
    total *= iv.hi - iv.lo + 1;
  }
  return total;
}

namespace {

void checkCoverage(const Formula& f, const SearchSpace& space) {
  std::set<VarId> dims;
  for (const auto& [v, iv] : space.dims) dims.insert(v);
  for (VarId v : collectVariables(f))
    if (!dims.contains(v))
      throw std::invalid_argument("search space does not cover variable v" + std::to_string(v));
}

// Formula compiled to dimension indices with 64-bit values and 128-bit sums.
// Used when every magnitude is below 2^40, which keeps each product below
// 2^80 and every atom sum far from overflow.
class FastFormula {
 public:
  static std::optional<FastFormula> compile(const Formula& f, const SearchSpace& space) {
    constexpr std::int64_t kLimit = std::int64_t{1} << 40;
    auto small = [&](const BigInt& v) { return absValue(v) < kLimit; };
    for (const auto& [v, iv] : space.dims)
      if (!small(iv.lo) || !small(iv.hi)) return std::nullopt;
    FastFormula out;
    std::map<VarId, std::size_t> index;
    for (std::size_t i = 0; i < space.dims.size(); ++i) index.emplace(space.dims[i].first, i);
    if (!out.build(f, index, small)) return std::nullopt;
    return out;
  }

  bool eval(const std::vector<std::int64_t>& x) const { return evalNode(root_, x); }

 private:
  struct Node {
    NodeKind kind;
    bool value = false;
    std::vector<std::pair<std::size_t, std::int64_t>> terms;
    std::int64_t bound = 0;
    std::vector<std::size_t> children;
  };

  template <class Small>
  bool build(const Formula& f, const std::map<VarId, std::size_t>& index, Small small) {
    auto r = add(f, index, small);
    if (!r) return false;
    root_ = *r;
    return true;
  }

  template <class Small>
  std::optional<std::size_t> add(const Formula& f, const std::map<VarId, std::size_t>& index,
                                 Small small) {
    Node n;
    n.kind = f.kind();
    switch (f.kind()) {
      case NodeKind::Const:
        n.value = f.value();
        break;
      case NodeKind::Atom:
        if (!small(f.atom().bound)) return std::nullopt;
        n.bound = static_cast<std::int64_t>(f.atom().bound);
        for (const auto& [v, c] : f.atom().coeffs) {
          if (!small(c)) return std::nullopt;
          n.terms.emplace_back(index.at(v), static_cast<std::int64_t>(c));
        }
        break;
      case NodeKind::Rel:
        return std::nullopt;
      default:
        for (const auto& c : f.children()) {
          auto idx = add(c, index, small);
          if (!idx) return std::nullopt;
          n.children.push_back(*idx);
        }
    }
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  bool evalNode(std::size_t i, const std::vector<std::int64_t>& x) const {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Const:
        return n.value;
      case NodeKind::Atom: {
        __int128 sum = 0;
        for (const auto& [d, c] : n.terms) sum += static_cast<__int128>(c) * x[d];
        return sum >= n.bound;
      }
      case NodeKind::Not:
        return !evalNode(n.children.front(), x);
      case NodeKind::And:
        for (std::size_t c : n.children)
          if (!evalNode(c, x)) return false;
        return true;
      case NodeKind::Or:
        for (std::size_t c : n.children)
          if (evalNode(c, x)) return true;
        return false;
      case NodeKind::Rel:
        break;
    }
    return false;
  }

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

// Calls `visit(point)` for every point of the box in lexicographic order
// until it returns true.
template <class Visit>
bool enumerate(const SearchSpace& space, Visit visit) {
  const std::size_t n = space.dims.size();
  std::vector<std::int64_t> lo(n), hi(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = static_cast<std::int64_t>(space.dims[i].second.lo);
    hi[i] = static_cast<std::int64_t>(space.dims[i].second.hi);
    if (hi[i] < lo[i]) return false;
    x[i] = lo[i];
  }
  for (;;) {
    if (visit(x)) return true;
    std::size_t i = n;
    for (;;) {
      if (i == 0) return false;
      --i;
      if (x[i] < hi[i]) {
        ++x[i];
        break;
      }
      x[i] = lo[i];
    }
  }
}

Model toModel(const SearchSpace& space, const std::vector<std::int64_t>& x) {
  Model m;
  for (std::size_t i = 0; i < space.dims.size(); ++i) m.emplace(space.dims[i].first, BigInt(x[i]));
  return m;
}

void checkGuard(const SearchSpace& space) {
  if (space.size() > kConfigurationGuard)
    throw GuardTripped("search space has " + space.size().str() + " configurations, guard is " +
                       std::to_string(kConfigurationGuard));
}

}  // namespace

std::optional<Model> bruteForceSolve(const Formula& f, const SearchSpace& space) {
  checkCoverage(f, space);
  checkGuard(space);
  if (space.size() == 0) return std::nullopt;
  auto fast = FastFormula::compile(f, space);
  std::optional<Model> found;
  enumerate(space, [&](const std::vector<std::int64_t>& x) {
    bool ok = fast ? fast->eval(x) : evaluate(f, toModel(space, x));
    if (ok) found = toModel(space, x);
    return ok;
  });
  return found;
}

std::optional<BigInt> minimalModelRadius(const Formula& f, const BigInt& maxRadius) {
  if (maxRadius < 0) return std::nullopt;
  SearchSpace space = SearchSpace::uniform(collectVariables(f), -maxRadius, maxRadius);
  checkGuard(space);
  auto fast = FastFormula::compile(f, space);
  std::optional<std::int64_t> best;
  enumerate(space, [&](const std::vector<std::int64_t>& x) {
    std::int64_t radius = 0;
    for (auto v : x) radius = std::max(radius, v < 0 ? -v : v);
    if (best && radius >= *best) return false;
    bool ok = fast ? fast->eval(x) : evaluate(f, toModel(space, x));
    if (ok) best = radius;
    return ok && radius == 0;
  });
  if (!best) return std::nullopt;
  return BigInt(*best);
}

//===----------------------------------------------------------------------===//
// Box search: DNF cubes, branch and bound over exact rational LP relaxations
//===----------------------------------------------------------------------===//

namespace {

struct Row {
  std::vector<BigInt> a;  // dense over the search dimensions
  BigInt b;
};

using Cube = std::vector<LinearAtom>;

void dnf(const Formula& f, std::vector<Cube>& out, std::size_t limit) {
  switch (f.kind()) {
    case NodeKind::Const:
      if (f.value()) out.push_back({});
      return;
    case NodeKind::Atom:
      out.push_back({f.atom()});
      return;
    case NodeKind::Or:
      for (const auto& c : f.children()) {
        dnf(c, out, limit);
        if (out.size() > limit) throw GuardTripped("DNF expansion exceeds cube limit");
      }
      return;
    case NodeKind::And: {
      std::vector<Cube> acc{{}};
      for (const auto& c : f.children()) {
        std::vector<Cube> part;
        dnf(c, part, limit);
        std::vector<Cube> next;
        for (const auto& x : acc)
          for (const auto& y : part) {
            Cube merged = x;
            merged.insert(merged.end(), y.begin(), y.end());
            next.push_back(std::move(merged));
            if (next.size() > limit) throw GuardTripped("DNF expansion exceeds cube limit");
          }
        acc = std::move(next);
      }
      out.insert(out.end(), acc.begin(), acc.end());
      return;
    }
    default:
      throw std::invalid_argument("boxSolve: formula must be normalized");
  }
}

BigInt gcd(BigInt a, BigInt b) {
  a = absValue(a);
  b = absValue(b);
  while (b != 0) {
    BigInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

BigInt floorRational(const Rational& r) {
  return floorDiv(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

// Phase-1 simplex with Bland's rule. Returns a vertex of
// { x : rows hold, lo <= x <= hi } or nullopt when empty.
std::optional<std::vector<Rational>> lpFeasible(const std::vector<Row>& rows,
                                                const std::vector<BigInt>& lo,
                                                const std::vector<BigInt>& hi) {
  const std::size_t n = lo.size();
  const std::size_t mc = rows.size();
  const std::size_t R = mc + n;
  // columns: y (n) | surplus s (mc) | slack t (n) | artificial (R) | rhs
  const std::size_t colS = n, colT = n + mc, colA = n + mc + n, C = colA + R;
  std::vector<std::vector<Rational>> T(R, std::vector<Rational>(C + 1, 0));
  std::vector<std::size_t> basis(R);
  std::vector<bool> artificial(C, false);
  for (std::size_t i = 0; i < mc; ++i) {
    // sum a y - s = b - sum a lo
    BigInt rhs = rows[i].b;
    for (std::size_t j = 0; j < n; ++j) rhs -= rows[i].a[j] * lo[j];
    int sign = rhs > 0 ? 1 : -1;
    for (std::size_t j = 0; j < n; ++j) T[i][j] = Rational(rows[i].a[j] * sign);
    T[i][colS + i] = -sign;
    T[i][C] = Rational(rhs * sign);
    if (sign < 0) {
      basis[i] = colS + i;
    } else {
      T[i][colA + i] = 1;
      artificial[colA + i] = true;
      basis[i] = colA + i;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t r = mc + j;
    T[r][j] = 1;
    T[r][colT + j] = 1;
    T[r][C] = Rational(hi[j] - lo[j]);
    basis[r] = colT + j;
  }

  for (;;) {
    // reduced cost of column j for minimizing the artificial sum
    std::optional<std::size_t> entering;
    for (std::size_t j = 0; j < C && !entering; ++j) {
      if (artificial[j]) continue;
      Rational d = 0;
      for (std::size_t r = 0; r < R; ++r)
        if (artificial[basis[r]]) d -= T[r][j];
      if (d < 0) entering = j;
    }
    if (!entering) break;
    const std::size_t e = *entering;
    std::optional<std::size_t> leave;
    Rational best;
    for (std::size_t r = 0; r < R; ++r) {
      if (T[r][e] <= 0) continue;
      Rational ratio = T[r][C] / T[r][e];
      if (!leave || ratio < best || (ratio == best && basis[r] < basis[*leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (!leave) break;  // unbounded direction cannot occur in phase 1
    const std::size_t l = *leave;
    Rational piv = T[l][e];
    for (auto& x : T[l]) x /= piv;
    for (std::size_t r = 0; r < R; ++r) {
      if (r == l || T[r][e] == 0) continue;
      Rational factor = T[r][e];
      for (std::size_t c = 0; c <= C; ++c) T[r][c] -= factor * T[l][c];
    }
    basis[l] = e;
  }
  for (std::size_t r = 0; r < R; ++r)
    if (artificial[basis[r]] && T[r][C] != 0) return std::nullopt;
  std::vector<Rational> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = Rational(lo[j]);
  for (std::size_t r = 0; r < R; ++r)
    if (basis[r] < n) x[basis[r]] += T[r][C];
  return x;
}

// Tightens bounds from each row; false when the box becomes empty.
bool satisfiesRows(const std::vector<Row>& rows, const std::vector<BigInt>& x) {
  for (const Row& row : rows) {
    BigInt sum = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (row.a[j] != 0) sum += row.a[j] * x[j];
    if (sum < row.b) return false;
  }
  return true;
}

bool propagate(const std::vector<Row>& rows, std::vector<BigInt>& lo, std::vector<BigInt>& hi) {
  for (int round = 0; round < 16; ++round) {
    bool changed = false;
    for (const auto& row : rows) {
      BigInt maxSum = 0;
      for (std::size_t j = 0; j < lo.size(); ++j)
        if (row.a[j] != 0) maxSum += row.a[j] * (row.a[j] > 0 ? hi[j] : lo[j]);
      if (maxSum < row.b) return false;
      for (std::size_t j = 0; j < lo.size(); ++j) {
        const BigInt& a = row.a[j];
        if (a == 0) continue;
        BigInt rest = row.b - (maxSum - a * (a > 0 ? hi[j] : lo[j]));
        if (a > 0) {
          BigInt nl = ceilDiv(rest, a);
          if (nl > lo[j]) {
            lo[j] = nl;
            changed = true;
          }
        } else {
          BigInt nh = floorDiv(rest, a);
          if (nh < hi[j]) {
            hi[j] = nh;
            changed = true;
          }
        }
        if (lo[j] > hi[j]) return false;
      }
    }
    if (!changed) break;
  }
  return true;
}

class BranchAndBound {
 public:
  BranchAndBound(std::vector<Row> rows, std::uint64_t& nodes, std::uint64_t budget)
      : rows_(std::move(rows)), nodes_(nodes), budget_(budget) {}

  std::optional<std::vector<BigInt>> run(std::vector<BigInt> lo, std::vector<BigInt> hi) {
    std::vector<std::pair<std::vector<BigInt>, std::vector<BigInt>>> stack;
    stack.emplace_back(std::move(lo), std::move(hi));
    while (!stack.empty()) {
      auto [l, h] = std::move(stack.back());
      stack.pop_back();
      if (++nodes_ > budget_) throw GuardTripped("box search node budget exhausted");
      if (!propagate(rows_, l, h)) continue;
      auto lp = lpFeasible(rows_, l, h);
      if (!lp) continue;
      std::vector<BigInt> rounded;
      std::optional<std::size_t> fractional;
      for (std::size_t j = 0; j < l.size(); ++j) {
        const Rational& v = (*lp)[j];
        BigInt r = floorRational(v + Rational(1, 2));
        rounded.push_back(std::clamp(r, l[j], h[j]));
        if (!fractional && boost::multiprecision::denominator(v) != 1) fractional = j;
      }
      if (satisfiesRows(rows_, rounded)) return rounded;
      if (!fractional) continue;
      // Fixing the variable first keeps the dive at most n levels deep.
      const std::size_t j = *fractional;
      const BigInt r = rounded[j];
      if (r < h[j]) {
        auto l2 = l;
        l2[j] = r + 1;
        stack.emplace_back(std::move(l2), h);
      }
      if (r > l[j]) {
        auto h2 = h;
        h2[j] = r - 1;
        stack.emplace_back(l, std::move(h2));
      }
      l[j] = r;
      h[j] = r;
      stack.emplace_back(std::move(l), std::move(h));
    }
    return std::nullopt;
  }

 private:
  std::vector<Row> rows_;
  std::uint64_t& nodes_;
  std::uint64_t budget_;
};

}  // namespace

std::optional<Model> boxSolve(const Formula& f, const SearchSpace& space, std::uint64_t nodeBudget) {
  checkCoverage(f, space);
  for (const auto& [v, iv] : space.dims)
    if (iv.hi < iv.lo) return std::nullopt;
  std::map<VarId, std::size_t> index;
  for (std::size_t i = 0; i < space.dims.size(); ++i) index.emplace(space.dims[i].first, i);

  std::vector<Cube> cubes;
  dnf(toNnf(f), cubes, 200'000);
  std::set<Cube> done;
  std::uint64_t nodes = 0;
  for (auto& cube : cubes) {
    std::sort(cube.begin(), cube.end());
    cube.erase(std::unique(cube.begin(), cube.end()), cube.end());
    if (!done.insert(cube).second) continue;

    std::vector<Row> rows;
    for (const auto& atom : cube) {
      BigInt g = 0;
      for (const auto& [v, c] : atom.coeffs) g = gcd(g, c);
      Row row;
      row.a.assign(space.dims.size(), 0);
      for (const auto& [v, c] : atom.coeffs) row.a[index.at(v)] = c / g;
      row.b = ceilDiv(atom.bound, g);
      rows.push_back(std::move(row));
    }
    std::vector<BigInt> lo, hi;
    for (const auto& [v, iv] : space.dims) {
      lo.push_back(iv.lo);
      hi.push_back(iv.hi);
    }
    BranchAndBound bnb(std::move(rows), nodes, nodeBudget);
    if (auto point = bnb.run(lo, hi)) {
      Model m;
      for (std::size_t i = 0; i < space.dims.size(); ++i) m.emplace(space.dims[i].first, (*point)[i]);
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace qfp
