#pragma once

// Bit-blasting of normalized NNF formulas into CNF.
//
// Every integer variable becomes a little-endian two's-complement vector.
// Unsigned domains are zero-extended, which is the same as pinning the sign
// bit to 0. An atom  sum a_j x_j >= b  is evaluated at a width wide enough
// that no intermediate sum wraps, and holds iff the sign bit of
// sum a_j x_j - b is clear.

#include "qfp/analysis.hpp"
#include "qfp/formula.hpp"

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qfp {

struct Cnf {
  int numVars = 0;
  std::vector<std::vector<int>> clauses;

  friend bool operator==(const Cnf&, const Cnf&) = default;
};

struct VarEncoding {
  DomainKind domain = DomainKind::Signed;
  unsigned bitWidth = 1;
  std::optional<std::size_t> anchor;  // index into EncodingPlan::anchorWidths
};

/// Per-variable widths, plus zero-anchor vectors shared by the variables of a
/// difference class: such a variable denotes bits(x) - bits(anchor).
struct EncodingPlan {
  std::map<VarId, VarEncoding> vars;
  std::vector<unsigned> anchorWidths;
};

EncodingPlan planFromAnalysis(const FormulaAnalysis& analysis);

/// Same plan with every width replaced by min(cap, width).
EncodingPlan capWidths(const EncodingPlan& plan, unsigned cap);

struct VarBits {
  DomainKind domain = DomainKind::Signed;
  std::vector<int> bits;  // boolean variable ids, LSB first
  std::optional<std::size_t> anchor;
};

struct VarMap {
  std::map<VarId, VarBits> vars;
  std::vector<std::vector<int>> anchors;  // unsigned vectors
  int numBoolVars = 0;

  std::size_t totalBits() const;
};

struct EncodeOptions {
  bool structuralHashing = true;
};

struct Encoding {
  Cnf cnf;
  VarMap map;
};

/// Throws std::invalid_argument when a formula variable is missing from the plan.
Encoding encode(const Formula& nnf, const EncodingPlan& plan, const EncodeOptions& opts = {});

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `assignment[v]` is the value of boolean variable v (index 0 unused).
Model decodeModel(const std::vector<bool>& assignment, const VarMap& map);

/// Two's-complement (Signed) or plain binary (Unsigned) value of LSB-first bits.
BigInt decodeBits(const std::vector<bool>& bits, DomainKind domain);

/// Writes "p cnf V C" followed by one 0-terminated clause per line. Comment
/// lines, when given, are written first with a "c " prefix.
void emitDimacs(const Cnf& cnf, std::ostream& out, const std::vector<std::string>& comments = {});
std::string toDimacs(const Cnf& cnf);

Cnf parseDimacs(std::istream& in);

/// Comment lines describing the variable map, for cmd_dimacs output.
std::vector<std::string> describeVarMap(const VarMap& map, const Symbols& symbols);

}  // namespace qfp
