#include "qfp/driver.hpp"

#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qfp {

namespace {

using Row = std::pair<std::vector<std::pair<std::size_t, BigInt>>, BigInt>;

class Generator {
 public:
  explicit Generator(const GenParams& p) : p_(p), rng_(p.seed) {}

  std::string run() {
    std::vector<Row> rows;
    std::set<Row> seen;
    const std::size_t attempts = 1000 * (p_.m + 1);
    std::size_t tries = 0;
    auto admit = [&](Row r) {
      if (seen.count(r)) return false;
      seen.insert(r);
      seen.insert(negated(r));
      rows.push_back(std::move(r));
      return true;
    };
    for (std::size_t i = 0; i < p_.k;) {
      if (++tries > attempts) throw std::invalid_argument("cannot plant distinct non-difference atoms");
      std::size_t width = i == 0 ? p_.w : 3 + pick(p_.w - 2);
      if (admit(general(width))) ++i;
    }
    for (std::size_t i = p_.k; i < p_.m;) {
      if (++tries > attempts) throw std::invalid_argument("cannot generate enough distinct difference atoms");
      if (admit(difference())) ++i;
    }
    shuffle(rows);

    std::ostringstream os;
    os << "(set-logic QF_LIA)\n";
    for (std::size_t i = 1; i <= p_.n; ++i) os << "(declare-fun x" << i << " () Int)\n";
    os << "(assert ";
    if (rows.empty())
      os << "true";
    else
      skeleton(os, rows, 0, rows.size(), p_.depth);
    os << ")\n(check-sat)\n";
    return os.str();
  }

 private:
  std::size_t pick(std::size_t range) { return static_cast<std::size_t>(rng_() % range); }

  BigInt constant() {
    BigInt span = 2 * p_.bMax + 1;
    std::uint64_t r = rng_();
    return BigInt(r) % span - p_.bMax;
  }

  BigInt coefficient() {
    BigInt span = 2 * p_.aMax;
    BigInt c = BigInt(rng_()) % span;
    return c < p_.aMax ? BigInt(c - p_.aMax) : BigInt(c - p_.aMax + 1);
  }

  static Row negated(const Row& r) {
    Row out;
    for (const auto& [v, c] : r.first) out.first.emplace_back(v, -c);
    out.second = -r.second + 1;
    return out;
  }

  Row general(std::size_t width) {
    std::set<std::size_t> vars;
    while (vars.size() < width) vars.insert(pick(p_.n));
    Row r;
    for (std::size_t v : vars) r.first.emplace_back(v, coefficient());
    r.second = constant();
    return r;
  }

  Row difference() {
    Row r;
    if (p_.n < 2 || pick(4) == 0) {
      r.first.emplace_back(pick(p_.n), pick(2) ? BigInt(1) : BigInt(-1));
    } else {
      std::size_t a = pick(p_.n);
      std::size_t b = pick(p_.n - 1);
      if (b >= a) ++b;
      r.first = {{a, BigInt(1)}, {b, BigInt(-1)}};
      if (b < a) std::swap(r.first[0], r.first[1]);
    }
    r.second = constant();
    return r;
  }

  void shuffle(std::vector<Row>& rows) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[pick(i)]);
  }

  static void number(std::ostream& os, const BigInt& v) {
    if (v < 0)
      os << "(- " << BigInt(-v) << ")";
    else
      os << v;
  }

  static void atom(std::ostream& os, const Row& r) {
    os << "(>= ";
    if (r.first.size() > 1) os << "(+";
    for (const auto& [v, c] : r.first) {
      if (r.first.size() > 1) os << " ";
      if (c == 1) {
        os << "x" << v + 1;
      } else if (c == -1) {
        os << "(- x" << v + 1 << ")";
      } else {
        os << "(* ";
        number(os, c);
        os << " x" << v + 1 << ")";
      }
    }
    if (r.first.size() > 1) os << ")";
    os << " ";
    number(os, r.second);
    os << ")";
  }

  void skeleton(std::ostream& os, const std::vector<Row>& rows, std::size_t lo, std::size_t hi,
                unsigned depth) {
    if (hi - lo == 1) {
      if (pick(4) == 0) {
        os << "(not ";
        atom(os, rows[lo]);
        os << ")";
      } else {
        atom(os, rows[lo]);
      }
      return;
    }
    os << (pick(2) ? "(and" : "(or");
    if (depth <= 1) {
      for (std::size_t i = lo; i < hi; ++i) {
        os << " ";
        skeleton(os, rows, i, i + 1, 0);
      }
    } else {
      std::size_t parts = std::min<std::size_t>(hi - lo, 2 + pick(3));
      std::size_t start = lo;
      for (std::size_t j = 0; j < parts; ++j) {
        std::size_t end = lo + (hi - lo) * (j + 1) / parts;
        os << " ";
        skeleton(os, rows, start, end, depth - 1);
        start = end;
      }
    }
    os << ")";
  }

  GenParams p_;
  std::mt19937_64 rng_;
};

}  // namespace

std::string generateFormula(const GenParams& params) {
  if (params.n == 0 && params.m > 0) throw std::invalid_argument("n must be positive");
  if (params.k > params.m) throw std::invalid_argument("k must not exceed m");
  if (params.k > 0 && (params.w < 3 || params.w > params.n))
    throw std::invalid_argument("w must satisfy 3 <= w <= n when k > 0");
  if (params.aMax < 1) throw std::invalid_argument("aMax must be at least 1");
  if (params.bMax < 0) throw std::invalid_argument("bMax must be non-negative");
  return Generator(params).run();
}

}  // namespace qfp
