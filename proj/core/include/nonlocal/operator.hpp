#pragma once

#include <vector>

#include "nonlocal/field.hpp"
#include "nonlocal/measure.hpp"
#include "nonlocal/types.hpp"

namespace nonlocal {

/// Value of Iu(x) with its split at |r| = 1 and error budget.
struct OperatorEval {
  double value = 0.0;
  /// Contribution of |r| < 1.
  double i1Part = 0.0;
  /// Contribution of |r| >= 1.
  double i2Part = 0.0;
  /// Bound on the skipped segment |r| < r0.
  double nearBound = 0.0;
  /// Bound on the truncated segment |r| > R (zero for closed-form tails).
  double tailBound = 0.0;
  /// Panel error estimates, closed-form tail errors and rounding.
  double panelError = 0.0;

  double budget() const noexcept { return nearBound + tailBound + panelError; }
};

/// u(x + y) + u(x - y) - 2u(x).
double secondDifference(const ScalarField& u, const Vec& x, const Vec& y);

/// Iu(x) = int_{S^{n-1}} int_R (u(x + theta r) + u(x - theta r) - 2u(x))
/// |r|^{-1-2s} dr dmu(theta).
///
/// `tol.absTol` is split as 1/4 near the origin, 1/2 for panels and 1/4 for
/// the tail. Throws DivergentTailError when the field has no closed-form
/// tail and its growth exponent is not below 2s, InputError on non-finite
/// field values and DomainError when u is not C^2 near x.
OperatorEval evalI(const ScalarField& u, const Vec& x, const SpectralMeasure& mu,
                   FractionalOrder s, Tolerance tol = {});
/// The part of evalI with |r| < 1; i2Part and tailBound are zero.
OperatorEval evalI1(const ScalarField& u, const Vec& x, const SpectralMeasure& mu,
                    FractionalOrder s, Tolerance tol = {});
/// The part of evalI with |r| >= 1; i1Part and nearBound are zero.
OperatorEval evalI2(const ScalarField& u, const Vec& x, const SpectralMeasure& mu,
                    FractionalOrder s, Tolerance tol = {});

/// Symbol of I: I(A cos(xi . x + phi)) = m(xi) A cos(xi . x + phi) with
/// m(xi) = -c_s int |xi . theta|^{2s} dmu(theta).
class Multiplier {
 public:
  Multiplier(const SpectralMeasure& mu, FractionalOrder s);

  double operator()(const Vec& xi) const;
  /// c_s = int_R 2(1 - cos t) |t|^{-1-2s} dt.
  double cs() const noexcept { return cs_; }
  double csError() const noexcept { return csError_; }
  FractionalOrder order() const noexcept { return s_; }

 private:
  std::vector<SphereNode> nodes_;
  FractionalOrder s_;
  double cs_;
  double csError_;
};

Multiplier multiplier(const SpectralMeasure& mu, FractionalOrder s);

struct SignReport {
  double value = 0.0;
  double budget = 0.0;
  /// value <= budget.
  bool nonPositive = false;
};

/// Evaluates Iu at a caller-asserted global maximum, where it must be <= 0.
SignReport maxPrincipleCheck(const ScalarField& u, const Vec& xMax,
                             const SpectralMeasure& mu, FractionalOrder s,
                             Tolerance tol = {});

}  // namespace nonlocal
