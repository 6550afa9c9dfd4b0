#pragma once

#include <Eigen/Core>

namespace nonlocal {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// The exponent s of an operator of order 2s, restricted to 0 < s < 1.
class FractionalOrder {
 public:
  explicit FractionalOrder(double s);

  double value() const noexcept { return s_; }
  /// The scaling order 2s.
  double order() const noexcept { return 2.0 * s_; }

  friend bool operator==(FractionalOrder a, FractionalOrder b) noexcept {
    return a.s_ == b.s_;
  }

 private:
  double s_;
};

/// Absolute and relative accuracy targets for a numerical evaluation.
struct Tolerance {
  double absTol = 1e-9;
  double relTol = 1e-9;

  /// Acceptance threshold for an estimate of magnitude `value`.
  double target(double value) const;
};

}  // namespace nonlocal
