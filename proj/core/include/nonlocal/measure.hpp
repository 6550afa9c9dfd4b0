#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nonlocal/types.hpp"

namespace nonlocal {

/// A point of the unit sphere S^{n-1}.
class Direction {
 public:
  /// Requires |components| = 1 within 1e-12.
  explicit Direction(Vec components);
  /// Rescales a nonzero vector onto the sphere.
  static Direction normalized(const Vec& v);

  const Vec& vector() const noexcept { return v_; }
  int dimension() const noexcept { return static_cast<int>(v_.size()); }

 private:
  Vec v_;
};

/// One node of the quadrature rule that realizes a spectral measure.
struct SphereNode {
  Vec direction;
  double weight;
};

struct Atom {
  Direction direction;
  double weight;
};

/// K0 = value.
struct ConstantKernel {
  double value = 1.0;
};
/// K0(theta) = 1 + strength (axis . theta)^2, strength > -1.
struct AxialKernel {
  Vec axis;
  double strength = 0.0;
};
/// K0 sampled at the nodes of the measure's own quadrature rule.
struct TabulatedKernel {
  std::vector<double> values;
};
using DensityKernel = std::variant<ConstantKernel, AxialKernel, TabulatedKernel>;

enum class MeasureKind { Atomic, Density, Uniform };

/// The spectral measure mu on S^{n-1}.
///
/// Every variant is stored as a weighted set of sphere nodes: atoms are
/// nodes, and the absolutely continuous variants carry a quadrature rule
/// (n = 1: the two points +-1; n = 2: M equispaced angles; n = 3: a
/// Gauss–Legendre rule in cos(theta) times 2p equispaced azimuths). The
/// operator, the multiplier and the nondegeneracy estimate all integrate
/// against this same rule.
class SpectralMeasure {
 public:
  /// An empty atom list gives the zero measure.
  static SpectralMeasure atomic(int n, std::vector<Atom> atoms);
  /// `resolution` is M for n = 2 and the Gauss order p for n = 3 (0 picks
  /// the default of 256 resp. 16).
  static SpectralMeasure uniform(int n, double totalMass, int resolution = 0);
  /// Throws ConvergenceError when the rule and its coarsened version
  /// disagree on the total mass by more than 1e-8 relative.
  static SpectralMeasure density(int n, DensityKernel kernel,
                                 int resolution = 0);

  int dimension() const noexcept { return n_; }
  MeasureKind kind() const noexcept { return kind_; }
  int resolution() const noexcept { return resolution_; }

  std::span<const SphereNode> nodes() const noexcept { return nodes_; }
  /// Nodes with antipodal pairs merged (the operator is even in theta).
  std::span<const SphereNode> foldedNodes() const noexcept { return folded_; }

  /// Lambda = mu(S^{n-1}).
  double totalMass() const noexcept { return mass_; }
  /// Quadrature error estimate of totalMass (zero for atoms and Uniform).
  double massError() const noexcept { return massError_; }

  /// int |nu . theta|^{2s} dmu(theta).
  double directionalMoment(const Vec& nu, FractionalOrder s) const;

  /// The measure with every weight multiplied by `factor` > 0.
  SpectralMeasure scaled(double factor) const;

  std::string describe() const;

 private:
  SpectralMeasure(int n, MeasureKind kind, int resolution,
                  std::vector<SphereNode> nodes, double mass,
                  double massError);

  int n_;
  MeasureKind kind_;
  int resolution_;
  std::vector<SphereNode> nodes_;
  std::vector<SphereNode> folded_;
  double mass_;
  double massError_;
};

double totalMass(const SpectralMeasure& mu);

enum class MinimizationMethod { Exact, GridAndSimplex };

/// Nondegeneracy data lambda, Lambda of a spectral measure.
struct NondegeneracyReport {
  /// Smallest directional moment found.
  double lambdaLower = 0.0;
  /// Total mass.
  double LambdaUpper = 0.0;
  Direction argminDirection;
  MinimizationMethod method = MinimizationMethod::Exact;
  bool degenerate = false;
  /// Grid minimum minus the Hölder modulus over the grid covering radius;
  /// a rigorous lower bound for the infimum.
  double holderLowerBound = 0.0;
  int candidates = 0;
};

struct LambdaOptions {
  int gridCount = 2048;
  /// Relative to max(Lambda, 1).
  double degenerateTol = 1e-10;
  int polishStarts = 4;
};

/// Minimizes nu -> int |nu . theta|^{2s} dmu over the sphere by a coarse
/// equal-area grid, candidates orthogonal to atoms, and a simplex polish.
NondegeneracyReport lambdaEstimate(const SpectralMeasure& mu, FractionalOrder s,
                                   const LambdaOptions& options = {});

/// Deterministic, roughly uniform directions on S^{n-1}: equispaced angles
/// for n = 2, a Fibonacci lattice for n = 3, +-1 for n = 1, and a seeded
/// Gaussian draw otherwise.
std::vector<Vec> spreadDirections(int n, int count, std::uint64_t seed = 0);

}  // namespace nonlocal
