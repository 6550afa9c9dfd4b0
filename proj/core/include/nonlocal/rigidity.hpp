#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal/barrier.hpp"
#include "nonlocal/field.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/measure.hpp"

namespace nonlocal {

enum class NonlinearityFamily { Zero, Linear, Cubic, Arctan, PiecewiseLinear };

/// A continuous nondecreasing f: R -> R from a closed catalog.
class Nonlinearity {
 public:
  static Nonlinearity zero();
  /// f(r) = slope r + offset, slope >= 0.
  static Nonlinearity linear(double slope, double offset);
  /// f(r) = coefficient r^3, coefficient >= 0.
  static Nonlinearity cubic(double coefficient);
  /// f(r) = atan(scale r), scale >= 0.
  static Nonlinearity arctan(double scale);
  /// Linear interpolation of (x, y) knots with strictly increasing x and
  /// nondecreasing y, constant beyond the end knots.
  static Nonlinearity piecewiseLinear(std::vector<std::pair<double, double>> knots);

  double operator()(double r) const;
  NonlinearityFamily family() const noexcept { return family_; }
  /// Family parameters: {slope, offset}, {coefficient}, {scale} or the
  /// flattened knots.
  std::vector<double> parameters() const;
  /// r -> -f(-r), which stays in the catalog.
  Nonlinearity mirrored() const;
  /// Lipschitz constant on [lo, hi].
  double lipschitz(double lo, double hi) const;
  bool identicallyZero() const;

 private:
  Nonlinearity(NonlinearityFamily family, double a, double b,
               std::vector<std::pair<double, double>> knots);
  void checkMonotone() const;

  NonlinearityFamily family_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
};

std::string toString(NonlinearityFamily family);

/// gamma = (2s + kappa)/2, which lies in (kappa, 2s).
double gammaRule(FractionalOrder s, double kappa);

/// w1 = u - u(x0) + 2 eps - eps v(. - x0) and w2 = u - u(x0) - 2 eps +
/// eps v(. - x0); w1(x0) = 2 eps and w2(x0) = -2 eps exactly.
std::pair<ScalarField, ScalarField> comparisonFields(const ScalarField& u, const Vec& x0,
                                                     double epsilon,
                                                     const BarrierField& barrier);

/// Smallest radius R >= 1 beyond which K(1 + (|x0| + rho)^kappa) + |u(x0)|
/// - eps rho^gamma < 0, so w1 < w1(x0) and w2 > w2(x0) for |x - x0| >= R.
/// Throws DomainError when no such radius exists below 10^6.
double certifiedSearchRadius(GrowthBound growth, double normX0, double u0,
                             double epsilon, double gamma);

struct SearchOptions {
  /// Grid points per axis at each zoom level; 0 picks 2001, 201 or 41 for
  /// n = 1, 2, 3.
  int pointsPerAxis = 0;
  /// Zoom stops once the level radius drops below this.
  double fineRadius = 1e-3;
  /// Candidates kept per level.
  int keep = 3;
};

struct ExtremumSearch {
  Vec argmax;
  double maxValue = 0.0;
  Vec argmin;
  double minValue = 0.0;
  double searchRadius = 0.0;
  /// Grid spacing of the finest level.
  double resolution = 0.0;
};

/// Grid search of the ball of radius `searchRadius` around x0 by zooming
/// grids (radius / 4 per level around the best candidates and x0) with a
/// final simplex polish. Pass only one field to search one side.
ExtremumSearch locateExtrema(const ScalarField* maximize, const ScalarField* minimize,
                             const Vec& x0, double searchRadius,
                             const SearchOptions& options = {});

struct SlackPair {
  /// From the w1 branch (maximum at y1).
  std::optional<double> upper;
  /// From the w2 branch (minimum at y2).
  std::optional<double> lower;
};

struct ReplayReport {
  double epsilon = 0.0;
  Vec x0;
  double gammaUsed = 0.0;
  double certifiedC = 0.0;
  double searchRadius = 0.0;
  double resolution = 0.0;
  std::optional<Vec> y1;
  std::optional<Vec> y2;
  /// -(Iu(y1) - eps Iv(y1 - x0)) and Iu(y2) + eps Iv(y2 - x0).
  SlackPair slack16bis;
  /// C eps - f(u(y1)) and f(u(y2)) + C eps.
  SlackPair slackFx;
  /// u(y1) - u(x0) + 2 eps and u(x0) + 2 eps - u(y2).
  SlackPair slackOrder;
  /// C eps - f(u(x0) - 2 eps) and f(u(x0) + 2 eps) + C eps.
  SlackPair slack188;
  /// [f(u(x0) - 2 eps) - C eps, f(u(x0) + 2 eps) + C eps] contains f(u(x0)).
  std::optional<std::pair<double, double>> bracket;
  /// Largest observed |Iu - f(u)| at y1, y2 and x0.
  double observedResidual = 0.0;
  /// Allowance subtracted from zero when judging slacks.
  double allowance = 0.0;
  bool consistent = true;
  std::string violatedInequality;
  std::optional<Vec> violationPoint;
  double violationValue = 0.0;
};

enum class Side { Both, Upper, Lower };

struct ReplayOptions {
  std::vector<double> epsilonSchedule{0.1, 0.05, 0.025, 0.0125};
  /// Declared bound on |Iu - f(u)| for the input field.
  double residual = 0.0;
  Tolerance tolerance{1e-9, 1e-9};
  SearchOptions search;
  /// Reuse a certified constant instead of certifying the barrier again.
  std::optional<double> certifiedC;
};

/// Replays the comparison argument for each eps of the schedule. A report
/// is consistent iff every slack is >= -(tol + residual + eps budget(Iv) +
/// budget(Iu)).
std::vector<ReplayReport> replay(const ScalarField& u, const Nonlinearity& f,
                                 const SpectralMeasure& mu, FractionalOrder s,
                                 const Vec& x0, const ReplayOptions& options = {});

/// As replay with only the w1 branch (Upper) or the w2 branch (Lower).
std::vector<ReplayReport> oneSidedReplay(const ScalarField& u, const Nonlinearity& f,
                                         const SpectralMeasure& mu, FractionalOrder s,
                                         const Vec& x0, Side side,
                                         const ReplayOptions& options = {});

struct FlowOptions {
  double dt = 0.01;
  long steps = 1000;
  /// Oscillation is recorded every `window` steps.
  int window = 100;
};

struct FlowReport {
  int gridSize = 0;
  double boxLength = 0.0;
  double timeStep = 0.0;
  long steps = 0;
  double initialOscillation = 0.0;
  double finalOscillation = 0.0;
  /// sup |Iu - f(u)| on the final grid.
  double finalResidual = 0.0;
  double limitConstant = 0.0;
  double fAtLimit = 0.0;
  double stabilityBound = 0.0;
  std::vector<double> oscillationHistory;
  /// Oscillation never increased between windows.
  bool monotoneOscillation = true;
  std::vector<double> finalValues;
};

/// Explicit Euler for u_t = Iu - f(u) with I applied through the multiplier.
/// Throws DomainError when dt exceeds 1/(max|m| + Lip f) and StabilityError
/// when sup|u| doubles.
FlowReport periodicFlow(const PeriodicGrid& u0, const Nonlinearity& f,
                        const SpectralMeasure& mu, FractionalOrder s,
                        const FlowOptions& options);

enum class SolutionClass { Constant, Affine, NonAffine };

struct Classification {
  SolutionClass kind = SolutionClass::NonAffine;
  double constant = 0.0;
  Vec slope;
  /// Relative least-squares residual of the affine fit.
  double residual = 0.0;
  /// Affine with nonzero slope although kappa < 1.
  bool inconsistentWithKappa = false;
};

/// Least-squares affine fit over the given samples with relative threshold
/// 1e-6.
Classification classifySamples(const std::vector<Vec>& points,
                               const std::vector<double>& values, double kappa);
/// Samples u at 200 seeded points of the ball of radius 10.
Classification classifySolution(const ScalarField& u, double kappa,
                                std::uint64_t seed = 0);
Classification classifySolution(const PeriodicGrid& u, double kappa);

std::string toString(SolutionClass kind);

}  // namespace nonlocal
