#include "nonlocal/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nonlocal/errors.hpp"

namespace nonlocal {

FractionalOrder::FractionalOrder(double s) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw DomainError("fractional order s must satisfy 0 < s < 1, got " +
                      std::to_string(s));
  }
}

double Tolerance::target(double value) const {
  return std::max(absTol, relTol * std::abs(value));
}

}  // namespace nonlocal
