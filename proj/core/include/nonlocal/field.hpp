#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nonlocal/types.hpp"

namespace nonlocal {

/// Declared growth |u(x)| <= K (1 + |x|^kappa).
struct GrowthBound {
  double K = 0.0;
  double kappa = 0.0;
};

/// r -> u(x + r d) + u(x - r d) - 2 u(x) along one direction d.
struct RadialSlice {
  std::function<double(double)> delta;
  /// False when the evaluation cancels catastrophically as r -> 0.
  bool stable = true;
  /// Absolute rounding error of a stable delta as r -> 0.
  double roundoff = 0.0;
};

/// int_R^inf delta(r) r^{-1-2s} dr (one side of the even integrand).
struct TailPiece {
  double value = 0.0;
  double error = 0.0;
};

/// Implementation interface behind ScalarField. Families override what
/// they can compute in closed form; the defaults fall back to plain
/// evaluation.
class FieldNode {
 public:
  FieldNode(int dimension, GrowthBound growth)
      : n_(dimension), growth_(growth) {}
  virtual ~FieldNode() = default;

  int dimension() const noexcept { return n_; }
  GrowthBound growth() const noexcept { return growth_; }

  virtual std::string family() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual double secondDifference(const Vec& x, const Vec& y) const;
  virtual RadialSlice slice(const Vec& x, const Vec& dir) const;
  /// Bound on the operator norm of D^2 u over the ball B(x, radius); +inf
  /// when the field is not C^2 there. The default samples central
  /// differences at x and applies a safety factor of 1.5.
  virtual double hessianBound(const Vec& x, double radius) const;
  /// Radii where the slice has kinks or steep features.
  virtual std::vector<double> radialBreakpoints(const Vec& x,
                                                const Vec& dir) const;
  /// Smallest R for which tail() is valid.
  virtual double tailStart(const Vec& x, const Vec& dir) const;
  /// Closed-form tail, when the family has one.
  virtual std::optional<TailPiece> tail(const Vec& x, const Vec& dir,
                                        double R, FractionalOrder s) const;

 private:
  int n_;
  GrowthBound growth_;
};

/// A function u: R^n -> R from a closed catalog of families. Immutable and
/// cheap to copy.
class ScalarField {
 public:
  struct Term;

  explicit ScalarField(std::shared_ptr<const FieldNode> node);

  /// u(x) = slope . x + offset.
  static ScalarField affine(Vec slope, double offset);
  static ScalarField constant(int n, double c);
  /// u(x) = x . A x with A symmetric.
  static ScalarField quadratic(Mat A);
  /// u(x) = amplitude cos(frequency . x + phase).
  static ScalarField cosine(Vec frequency, double amplitude, double phase);
  /// u(x) = sum_j amplitude_j cos(frequency_j . x + phase_j); frequencies
  /// are the columns of `frequencies`.
  static ScalarField cosineSum(Mat frequencies, std::vector<double> amplitudes,
                               std::vector<double> phases);
  /// u(x) = |x|^gamma.
  static ScalarField purePower(int n, double gamma);
  static ScalarField sum(std::vector<Term> terms);

  /// x -> u(x + shift).
  ScalarField translated(const Vec& shift) const;
  /// x -> u(Q x) for orthogonal Q.
  ScalarField rotated(const Mat& Q) const;
  /// Replaces the declared growth bound after checking it on a seeded
  /// sample of 10^4 points within radius 10^3.
  ScalarField withGrowth(GrowthBound growth, std::uint64_t seed = 0) const;

  double operator()(const Vec& x) const { return node_->value(x); }
  double secondDifference(const Vec& x, const Vec& y) const {
    return node_->secondDifference(x, y);
  }
  int dimension() const noexcept { return node_->dimension(); }
  GrowthBound growth() const noexcept { return node_->growth(); }
  std::string family() const { return node_->family(); }
  const FieldNode& node() const noexcept { return *node_; }

 private:
  std::shared_ptr<const FieldNode> node_;
};

struct ScalarField::Term {
  double weight;
  ScalarField field;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double weight, const ScalarField& u);

/// Checks |u(x)| <= K (1 + |x|^kappa) on `count` seeded points of the ball
/// of radius `radius`; throws DomainError naming the first violation.
void checkGrowth(const ScalarField& u, std::uint64_t seed, int count = 10000,
                 double radius = 1e3);

/// u(x + y) + u(x - y) - 2 u(x) for u = |.|^gamma, without catastrophic
/// cancellation when |y| << |x|.
double powerSecondDifference(const Vec& x, const Vec& y, double gamma);

/// Tail of the slice of |.|^gamma: int_R^inf (|x + r d|^gamma +
/// |x - r d|^gamma - 2|x|^gamma) r^{-1-2s} dr for R >= max(1, 2|x|).
TailPiece powerTail(const Vec& x, const Vec& dir, double R, double gamma,
                    FractionalOrder s);

/// Operator norm bound of D^2 |.|^gamma on B(x, radius); +inf if the ball
/// reaches the origin.
double powerHessianBound(const Vec& x, double radius, double gamma);

}  // namespace nonlocal
