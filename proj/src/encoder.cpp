#include "qfp/encoder.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qfp {

namespace {

constexpr int kTrue = INT_MAX;
constexpr int kFalse = -INT_MAX;

using Bits = std::vector<int>;

// Tseitin gate builder with constant folding and optional structural hashing.
class Circuit {
 public:
  Circuit(Cnf& cnf, bool hashing) : cnf_(cnf), hashing_(hashing) {}

  int newVar() { return ++cnf_.numVars; }

  int mkAnd(std::vector<int> xs) {
    std::vector<int> kept;
    for (int x : xs) {
      if (x == kFalse) return kFalse;
      if (x != kTrue) kept.push_back(x);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    for (int x : kept)
      if (x > 0 && std::binary_search(kept.begin(), kept.end(), -x)) return kFalse;
    if (kept.empty()) return kTrue;
    if (kept.size() == 1) return kept.front();
    if (hashing_) {
      auto it = andCache_.find(kept);
      if (it != andCache_.end()) return it->second;
    }
    int o = newVar();
    std::vector<int> big{o};
    for (int x : kept) {
      cnf_.clauses.push_back({-o, x});
      big.push_back(-x);
    }
    cnf_.clauses.push_back(std::move(big));
    if (hashing_) andCache_.emplace(std::move(kept), o);
    return o;
  }

  int mkOr(std::vector<int> xs) {
    for (int& x : xs) x = -x;
    return -mkAnd(std::move(xs));
  }

  int mkXor(int a, int b) {
    if (a == kFalse) return b;
    if (a == kTrue) return -b;
    if (b == kFalse) return a;
    if (b == kTrue) return -a;
    if (a == b) return kFalse;
    if (a == -b) return kTrue;
    bool parity = false;
    if (a < 0) {
      a = -a;
      parity = !parity;
    }
    if (b < 0) {
      b = -b;
      parity = !parity;
    }
    if (a > b) std::swap(a, b);
    int o;
    auto key = std::make_pair(a, b);
    auto it = hashing_ ? xorCache_.find(key) : xorCache_.end();
    if (it != xorCache_.end()) {
      o = it->second;
    } else {
      o = newVar();
      cnf_.clauses.push_back({-o, a, b});
      cnf_.clauses.push_back({-o, -a, -b});
      cnf_.clauses.push_back({o, -a, b});
      cnf_.clauses.push_back({o, a, -b});
      if (hashing_) xorCache_.emplace(key, o);
    }
    return parity ? -o : o;
  }

  // Ripple-carry addition modulo 2^width.
  Bits add(const Bits& a, const Bits& b, int carry) {
    Bits sum(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      int half = mkXor(a[i], b[i]);
      sum[i] = mkXor(half, carry);
      if (i + 1 < a.size()) carry = mkOr({mkAnd({a[i], b[i]}), mkAnd({carry, half})});
    }
    return sum;
  }

 private:
  Cnf& cnf_;
  bool hashing_;
  std::map<std::vector<int>, int> andCache_;
  std::map<std::pair<int, int>, int> xorCache_;
};

Bits extend(const Bits& v, std::size_t width, DomainKind domain) {
  Bits out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(v.size(), width)));
  int fill = domain == DomainKind::Signed ? v.back() : kFalse;
  out.resize(width, fill);
  return out;
}

Bits constantBits(BigInt value, std::size_t width) {
  if (value < 0) value += BigInt(1) << width;
  Bits out(width);
  for (std::size_t i = 0; i < width; ++i)
    out[i] = boost::multiprecision::bit_test(value, static_cast<unsigned>(i)) ? kTrue : kFalse;
  return out;
}

Bits shiftLeft(const Bits& v, std::size_t by) {
  Bits out(v.size(), kFalse);
  for (std::size_t i = by; i < v.size(); ++i) out[i] = v[i - by];
  return out;
}

Bits invert(Bits v) {
  for (int& x : v) x = -x;
  return v;
}

// Largest |value| a vector can hold.
BigInt magnitude(std::size_t width, DomainKind domain) {
  if (domain == DomainKind::Signed) return BigInt(1) << (width - 1);
  return (BigInt(1) << width) - 1;
}

struct Operand {
  BigInt coeff;
  const Bits* bits;
  DomainKind domain;
};

class Encoder {
 public:
  Encoder(Cnf& cnf, VarMap& map, bool hashing) : circuit_(cnf, hashing), map_(map) {}

  int literal(const Formula& f) {
    switch (f.kind()) {
      case NodeKind::Const:
        return f.value() ? kTrue : kFalse;
      case NodeKind::Atom:
        return atom(f.atom());
      case NodeKind::And:
      case NodeKind::Or: {
        std::vector<int> lits;
        for (const auto& c : f.children()) lits.push_back(literal(c));
        return f.kind() == NodeKind::And ? circuit_.mkAnd(std::move(lits))
                                         : circuit_.mkOr(std::move(lits));
      }
      case NodeKind::Not:
      case NodeKind::Rel:
        break;
    }
    throw std::invalid_argument("encode: formula is not in negation normal form");
  }

  Circuit& circuit() { return circuit_; }

 private:
  // An atom and its negation share one circuit; atoms over the same linear
  // form share the sum and differ only in the final comparison.
  int atom(const LinearAtom& a) {
    if (a.coeffs.begin()->second < 0) return -atom(negateAtom(a));
    auto cached = atomCache_.find(a);
    if (cached != atomCache_.end()) return cached->second;

    const Bits& sum = linearSum(a.coeffs);
    const std::size_t width = std::max<std::size_t>(sum.size(), bitLength(absValue(a.bound)) + 1) + 1;
    Bits diff = circuit_.add(extend(sum, width, DomainKind::Signed), constantBits(-a.bound, width), kFalse);
    int lit = -diff.back();
    atomCache_.emplace(a, lit);
    return lit;
  }

  // Two's-complement sum_j a_j x_j, wide enough that it cannot wrap.
  const Bits& linearSum(const std::map<VarId, BigInt>& coeffs) {
    auto cached = sumCache_.find(coeffs);
    if (cached != sumCache_.end()) return cached->second;

    std::vector<Operand> ops;
    std::map<std::size_t, BigInt> anchorCoeff;
    for (const auto& [v, c] : coeffs) {
      const VarBits& vb = map_.vars.at(v);
      ops.push_back({c, &vb.bits, vb.domain});
      if (vb.anchor) anchorCoeff[*vb.anchor] -= c;
    }
    for (const auto& [idx, c] : anchorCoeff)
      if (c != 0) ops.push_back({c, &map_.anchors[idx], DomainKind::Unsigned});

    BigInt total = 0;
    for (const auto& op : ops) total += absValue(op.coeff) * magnitude(op.bits->size(), op.domain);
    const std::size_t width = bitLength(total) + 1;

    Bits acc = constantBits(0, width);
    for (const auto& op : ops) {
      Bits ext = extend(*op.bits, width, op.domain);
      BigInt mag = absValue(op.coeff);
      for (unsigned i = 0; i < bitLength(mag); ++i) {
        if (!boost::multiprecision::bit_test(mag, i)) continue;
        Bits term = shiftLeft(ext, i);
        acc = op.coeff > 0 ? circuit_.add(acc, term, kFalse)
                           : circuit_.add(acc, invert(std::move(term)), kTrue);
      }
    }
    return sumCache_.emplace(coeffs, std::move(acc)).first->second;
  }

  Circuit circuit_;
  VarMap& map_;
  std::map<LinearAtom, int> atomCache_;
  std::map<std::map<VarId, BigInt>, Bits> sumCache_;
};

}  // namespace

std::size_t VarMap::totalBits() const {
  std::size_t total = 0;
  for (const auto& [v, vb] : vars) total += vb.bits.size();
  for (const auto& a : anchors) total += a.size();
  return total;
}

EncodingPlan planFromAnalysis(const FormulaAnalysis& analysis) {
  EncodingPlan plan;
  for (const auto& c : analysis.classes) {
    std::optional<std::size_t> anchor;
    if (c.zeroAnchor) {
      anchor = plan.anchorWidths.size();
      plan.anchorWidths.push_back(c.bound.bitWidth);
    }
    for (VarId v : c.cls.variables) plan.vars[v] = {c.bound.domain, c.bound.bitWidth, anchor};
  }
  return plan;
}

EncodingPlan capWidths(const EncodingPlan& plan, unsigned cap) {
  EncodingPlan out = plan;
  for (auto& [v, e] : out.vars) e.bitWidth = std::min(e.bitWidth, cap);
  for (auto& w : out.anchorWidths) w = std::min(w, cap);
  return out;
}

Encoding encode(const Formula& nnf, const EncodingPlan& plan, const EncodeOptions& opts) {
  Encoding result;
  Encoder encoder(result.cnf, result.map, opts.structuralHashing);
  Circuit& circuit = encoder.circuit();

  std::set<std::size_t> anchorsUsed;
  for (VarId v : collectVariables(nnf)) {
    auto it = plan.vars.find(v);
    if (it == plan.vars.end())
      throw std::invalid_argument("encode: no bound for variable v" + std::to_string(v));
    const VarEncoding& e = it->second;
    if (e.bitWidth == 0) throw std::invalid_argument("encode: zero bit width");
    VarBits vb;
    vb.domain = e.domain;
    vb.anchor = e.anchor;
    for (unsigned i = 0; i < e.bitWidth; ++i) vb.bits.push_back(circuit.newVar());
    if (e.anchor) anchorsUsed.insert(*e.anchor);
    result.map.vars.emplace(v, std::move(vb));
  }
  result.map.anchors.resize(plan.anchorWidths.size());
  for (std::size_t idx : anchorsUsed)
    for (unsigned i = 0; i < plan.anchorWidths.at(idx); ++i)
      result.map.anchors[idx].push_back(circuit.newVar());

  int root = encoder.literal(nnf);
  if (root == kFalse)
    result.cnf.clauses.push_back({});
  else if (root != kTrue)
    result.cnf.clauses.push_back({root});
  result.map.numBoolVars = result.cnf.numVars;
  return result;
}

BigInt decodeBits(const std::vector<bool>& bits, DomainKind domain) {
  BigInt value = 0;
  for (std::size_t i = bits.size(); i-- > 0;) {
    value <<= 1;
    if (bits[i]) value += 1;
  }
  if (domain == DomainKind::Signed && !bits.empty() && bits.back())
    value -= BigInt(1) << bits.size();
  return value;
}

namespace {

std::vector<bool> lookupBits(const std::vector<bool>& assignment, const std::vector<int>& ids) {
  std::vector<bool> out;
  for (int id : ids) {
    if (id <= 0 || static_cast<std::size_t>(id) >= assignment.size())
      throw DecodeError("assignment is missing boolean variable " + std::to_string(id));
    out.push_back(assignment[static_cast<std::size_t>(id)]);
  }
  return out;
}

}  // namespace

Model decodeModel(const std::vector<bool>& assignment, const VarMap& map) {
  Model m;
  for (const auto& [v, vb] : map.vars) {
    BigInt value = decodeBits(lookupBits(assignment, vb.bits), vb.domain);
    if (vb.anchor)
      value -= decodeBits(lookupBits(assignment, map.anchors.at(*vb.anchor)), DomainKind::Unsigned);
    m.emplace(v, std::move(value));
  }
  return m;
}

void emitDimacs(const Cnf& cnf, std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "c " << c << "\n";
  out << "p cnf " << cnf.numVars << " " << cnf.clauses.size() << "\n";
  for (const auto& clause : cnf.clauses) {
    for (int lit : clause) out << lit << " ";
    out << "0\n";
  }
  if (!out) throw std::runtime_error("failed to write DIMACS output");
}

std::string toDimacs(const Cnf& cnf) {
  std::ostringstream os;
  emitDimacs(cnf, os);
  return os.str();
}

Cnf parseDimacs(std::istream& in) {
  Cnf cnf;
  std::string line;
  bool header = false;
  std::size_t expected = 0;
  std::vector<int> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c" || first[0] == 'c') continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> cnf.numVars >> expected) || fmt != "cnf")
        throw std::runtime_error("malformed DIMACS header: " + line);
      header = true;
      continue;
    }
    if (!header) throw std::runtime_error("DIMACS clause before header");
    std::istringstream all(line);
    long long lit;
    while (all >> lit) {
      if (lit == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
      } else {
        if (std::llabs(lit) > cnf.numVars)
          throw std::runtime_error("DIMACS literal exceeds declared variable count");
        current.push_back(static_cast<int>(lit));
      }
    }
  }
  if (!header) throw std::runtime_error("missing DIMACS header");
  if (!current.empty()) throw std::runtime_error("unterminated DIMACS clause");
  if (cnf.clauses.size() != expected)
    throw std::runtime_error("DIMACS clause count does not match header");
  return cnf;
}

std::vector<std::string> describeVarMap(const VarMap& map, const Symbols& symbols) {
  std::vector<std::string> lines;
  auto join = [](const std::vector<int>& ids) {
    std::string s;
    for (int id : ids) s += " " + std::to_string(id);
    return s;
  };
  for (const auto& [v, vb] : map.vars) {
    std::string line = "var " + symbols.name(v) + " " + domainName(vb.domain) + " " +
                       std::to_string(vb.bits.size());
    if (vb.anchor) line += " anchor " + std::to_string(*vb.anchor);
    lines.push_back(line + " bits" + join(vb.bits));
  }
  for (std::size_t i = 0; i < map.anchors.size(); ++i)
    if (!map.anchors[i].empty())
      lines.push_back("anchor " + std::to_string(i) + " bits" + join(map.anchors[i]));
  return lines;
}

}  // namespace qfp
