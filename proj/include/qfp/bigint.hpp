#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace qfp {

using BigInt = boost::multiprecision::cpp_int;

/// Number of bits needed to write a non-negative value, i.e. ceil(log2(v + 1)).
inline unsigned bitLength(const BigInt& v) {
  if (v <= 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
}

inline BigInt absValue(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

inline std::string toString(const BigInt& v) { return v.str(); }

/// Floor division for arbitrary signs.
inline BigInt floorDiv(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline BigInt ceilDiv(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

}  // namespace qfp
