#pragma once

#include "qfp/formula.hpp"

#include <stdexcept>
#include <vector>

namespace qfp {

class ArityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replaces every syntactically distinct application f(t1..ta) (arguments
/// compared after linear normalization) with a fresh integer variable and
/// conjoins the congruence instance
///   (t1 = u1 & ... & ta = ua) => v1 = v2
/// for every pair of applications of the same symbol. Fresh variables are
/// interned into `symbols` under the name "<f>!<k>".
Formula ackermannize(const Formula& f, Symbols& symbols, const std::vector<FunSymbol>& functions);

}  // namespace qfp
