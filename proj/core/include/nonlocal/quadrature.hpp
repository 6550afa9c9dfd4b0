#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nonlocal/types.hpp"

namespace nonlocal {

/// Result of an adaptive integration.
struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  /// True when the panel cap stopped refinement before the tolerance was met.
  bool capped = false;
};

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over the union of the
/// panels delimited by `breaks` (sorted, at least two entries).
///
/// The worst panel is bisected until the summed |K15 - G7| estimate meets
/// `tol` or `maxPanels` is reached. Nodes never touch panel endpoints, so
/// integrable endpoint singularities are allowed.
QuadResult integrate(const std::function<double(double)>& f,
                     std::span<const double> breaks, Tolerance tol,
                     int maxPanels = 4000);

QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, Tolerance tol, int maxPanels = 4000);

/// Geometric breakpoints a, a*ratio, ..., b (always including both ends).
std::vector<double> geometricBreaks(double a, double b, double ratio);

/// Discretization of 2 * int_{r0}^{R} g(r) r^{-1-2s} dr.
struct RadialQuadPlan {
  FractionalOrder s;
  double innerRadius;
  double outerRadius;
  std::vector<double> breakpoints;
  Tolerance tolerance;
  int maxPanels = 4000;

  /// Geometric initial panels (ratio 4) plus any interior `extraBreaks`.
  static RadialQuadPlan make(FractionalOrder s, double r0, double R,
                             Tolerance tol,
                             std::span<const double> extraBreaks = {});
};

/// Error budget of one radial integral split into near, panel and tail parts.
struct SegmentBudget {
  double nearOriginBound = 0.0;
  double tailBound = 0.0;
  double panelEstimate = 0.0;
  double panelErrorEstimate = 0.0;
};

/// Bound on |2 int_0^{r0} d(r) r^{-1-2s} dr| when |d(r)| <= M r^2.
double nearOriginBound(double M, FractionalOrder s, double r0);

/// Bound on |2 int_R^inf d(r) r^{-1-2s} dr| when the field grows at most
/// like K(1 + |x|^kappa); `uAtX` and `normX` describe the base point.
/// Throws DivergentTailError when kappa >= 2s.
double tailBound(double K, double kappa, double uAtX, double normX,
                 FractionalOrder s, double R);

/// 2 int_{r0}^{R} g(r) r^{-1-2s} dr over the panels of `plan`.
/// Throws InputError when g is not finite at some node.
QuadResult adaptivePanelIntegrate(const std::function<double(double)>& g,
                                  const RadialQuadPlan& plan);

/// int_R^inf (cos(omega r) - 1) r^{-1-2s} dr, computed by rotating the
/// oscillatory part onto the imaginary axis. Requires R > 0.
QuadResult cosineTailIntegral(double omega, double R, FractionalOrder s);

/// c_s = int_R 2(1 - cos t) |t|^{-1-2s} dt with its error estimate.
struct FractionalConstant {
  double value;
  double error;
};

/// Computed once per s and cached; safe to call concurrently.
FractionalConstant fractionalConstant(FractionalOrder s);

}  // namespace nonlocal
