#include "nonlocal/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "nonlocal/errors.hpp"
#include "nonlocal/simplex.hpp"

namespace nonlocal {
namespace {

constexpr double kPi = std::numbers::pi;

// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
void gaussLegendre(int p, std::vector<double>& x, std::vector<double>& w) {
  x.assign(p, 0.0);
  w.assign(p, 0.0);
  for (int i = 0; i < p; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (p + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= p; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = p * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

Vec canonicalSign(Vec v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-14) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

std::vector<SphereNode> fold(const std::vector<SphereNode>& nodes) {
  std::vector<SphereNode> out;
  for (const auto& node : nodes) {
    const Vec d = canonicalSign(node.direction);
    bool merged = false;
    for (auto& existing : out) {
      if ((existing.direction - d).norm() < 1e-12) {
        existing.weight += node.weight;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(SphereNode{d, node.weight});
  }
  return out;
}

// Unit directions of the quadrature rule and their surface weights.
std::vector<SphereNode> sphereRule(int n, int resolution) {
  std::vector<SphereNode> rule;
  if (n == 1) {
    rule.push_back({Vec::Constant(1, 1.0), 1.0});
    rule.push_back({Vec::Constant(1, -1.0), 1.0});
  } else if (n == 2) {
    for (int j = 0; j < resolution; ++j) {
      const double phi = 2.0 * kPi * j / resolution;
      Vec d(2);
      d << std::cos(phi), std::sin(phi);
      rule.push_back({d, 2.0 * kPi / resolution});
    }
  } else if (n == 3) {
    std::vector<double> z;
    std::vector<double> w;
    gaussLegendre(resolution, z, w);
    const int azimuths = 2 * resolution;
    for (int i = 0; i < resolution; ++i) {
      const double rho = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
      for (int k = 0; k < azimuths; ++k) {
        const double phi = 2.0 * kPi * k / azimuths;
        Vec d(3);
        d << rho * std::cos(phi), rho * std::sin(phi), z[i];
        rule.push_back({d, w[i] * 2.0 * kPi / azimuths});
      }
    }
  } else {
    throw DomainError("continuous spectral measures are supported for n <= 3");
  }
  return rule;
}

int defaultResolution(int n) { return n == 2 ? 256 : (n == 3 ? 16 : 2); }

// Mass of the rule restricted to every other node (n = 2) or every other
// azimuth (n = 3), with doubled weights.
double coarseMass(int n, int resolution, const std::vector<SphereNode>& nodes) {
  if (n == 1) return nodes[0].weight + nodes[1].weight;
  double total = 0.0;
  if (n == 2) {
    for (std::size_t j = 0; j < nodes.size(); j += 2) total += 2.0 * nodes[j].weight;
    return total;
  }
  const int azimuths = 2 * resolution;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if ((j % azimuths) % 2 == 0) total += 2.0 * nodes[j].weight;
  }
  return total;
}

double kernelAt(const DensityKernel& kernel, const Vec& theta, std::size_t index) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstantKernel>) {
          return k.value;
        } else if constexpr (std::is_same_v<K, AxialKernel>) {
          const double c = k.axis.dot(theta);
          return 1.0 + k.strength * c * c;
        } else {
          return k.values.at(index);
        }
      },
      kernel);
}

double moment(std::span<const SphereNode> nodes, const Vec& nu, double two_s) {
  double total = 0.0;
  for (const auto& node : nodes) {
    total += node.weight * std::pow(std::abs(nu.dot(node.direction)), two_s);
  }
  return total;
}

Vec snap(Vec v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < 1e-15) v[i] = 0.0;
  }
  return v;
}

}  // namespace

Direction::Direction(Vec components) : v_(std::move(components)) {
  if (v_.size() < 1 || std::abs(v_.norm() - 1.0) > 1e-12) {
    throw DomainError("direction must have unit Euclidean norm");
  }
}

Direction Direction::normalized(const Vec& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("cannot normalize a zero or non-finite vector");
  }
  return Direction(v / norm);
}

SpectralMeasure::SpectralMeasure(int n, MeasureKind kind, int resolution,
                                 std::vector<SphereNode> nodes, double mass,
                                 double massError)
    : n_(n),
      kind_(kind),
      resolution_(resolution),
      nodes_(std::move(nodes)),
      folded_(fold(nodes_)),
      mass_(mass),
      massError_(massError) {}

SpectralMeasure SpectralMeasure::atomic(int n, std::vector<Atom> atoms) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  std::vector<SphereNode> nodes;
  double mass = 0.0;
  for (const auto& atom : atoms) {
    if (atom.direction.dimension() != n) {
      throw DomainError("atom direction has the wrong dimension");
    }
    if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
      throw DomainError("atomic weights must be strictly positive and finite");
    }
    nodes.push_back({atom.direction.vector(), atom.weight});
    mass += atom.weight;
  }
  return SpectralMeasure(n, MeasureKind::Atomic, 0, std::move(nodes), mass, 0.0);
}

SpectralMeasure SpectralMeasure::uniform(int n, double totalMass, int resolution) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (!(totalMass > 0.0) || !std::isfinite(totalMass)) {
    throw DomainError("uniform measure needs a positive finite total mass");
  }
  if (resolution <= 0) resolution = defaultResolution(n);
  if (n == 2 && resolution % 2 != 0) {
    throw DomainError("n = 2 rules need an even number of angles");
  }
  auto nodes = sphereRule(n, resolution);
  double area = 0.0;
  for (const auto& node : nodes) area += node.weight;
  for (auto& node : nodes) node.weight *= totalMass / area;
  return SpectralMeasure(n, MeasureKind::Uniform, resolution, std::move(nodes),
                         totalMass, 0.0);
}

SpectralMeasure SpectralMeasure::density(int n, DensityKernel kernel, int resolution) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (const auto* table = std::get_if<TabulatedKernel>(&kernel)) {
    const auto count = static_cast<int>(table->values.size());
    if (n == 1) {
      resolution = 2;
    } else if (n == 2) {
      resolution = count;
    } else if (n == 3) {
      resolution = static_cast<int>(std::lround(std::sqrt(count / 2.0)));
    }
    if (n <= 3 && static_cast<int>(sphereRule(n, n == 1 ? 2 : resolution).size()) != count) {
      throw DomainError("tabulated kernel size does not match a sphere rule");
    }
  }
  if (const auto* axial = std::get_if<AxialKernel>(&kernel)) {
    if (axial->axis.size() != n || !(axial->strength > -1.0)) {
      throw DomainError("axial kernel needs an n-vector axis and strength > -1");
    }
  }
  if (resolution <= 0) resolution = defaultResolution(n);
  if (n == 2 && resolution % 2 != 0) {
    throw DomainError("n = 2 rules need an even number of angles");
  }
  auto nodes = sphereRule(n, resolution);
  double lo = HUGE_VAL;
  double hi = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double k0 = kernelAt(kernel, nodes[i].direction, i);
    if (!std::isfinite(k0)) throw DomainError("density kernel is not finite");
    lo = std::min(lo, k0);
    hi = std::max(hi, k0);
    nodes[i].weight *= k0;
    mass += nodes[i].weight;
  }
  if (!(lo > 0.0)) {
    throw DomainError("density kernel must be bounded away from zero");
  }
  const double coarse = coarseMass(n, resolution, nodes);
  const double residual = std::abs(mass - coarse);
  if (residual > 1e-8 * mass) {
    std::ostringstream msg;
    msg << "density quadrature did not converge: fine and coarse masses "
           "differ by "
        << residual;
    throw ConvergenceError(msg.str(), residual);
  }
  return SpectralMeasure(n, MeasureKind::Density, resolution, std::move(nodes),
                         mass, residual);
}

double SpectralMeasure::directionalMoment(const Vec& nu, FractionalOrder s) const {
  return moment(folded_, nu, s.order());
}

SpectralMeasure SpectralMeasure::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("scale factor must be positive");
  auto nodes = nodes_;
  for (auto& node : nodes) node.weight *= factor;
  return SpectralMeasure(n_, kind_, resolution_, std::move(nodes), mass_ * factor,
                         massError_ * factor);
}

std::string SpectralMeasure::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case MeasureKind::Atomic: out << "atomic(" << nodes_.size() << " atoms)"; break;
    case MeasureKind::Density: out << "density(resolution " << resolution_ << ")"; break;
    case MeasureKind::Uniform: out << "uniform(resolution " << resolution_ << ")"; break;
  }
  out << " on S^" << (n_ - 1) << ", mass " << mass_;
  return out.str();
}

double totalMass(const SpectralMeasure& mu) { return mu.totalMass(); }

std::vector<Vec> spreadDirections(int n, int count, std::uint64_t seed) {
  std::vector<Vec> out;
  out.reserve(count);
  if (n == 1) {
    for (int j = 0; j < count; ++j) out.push_back(Vec::Constant(1, j % 2 == 0 ? 1.0 : -1.0));
  } else if (n == 2) {
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * kPi * j / count;
      Vec d(2);
      d << std::cos(phi), std::sin(phi);
      out.push_back(snap(d));
    }
  } else if (n == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < count; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / count;
      const double rho = std::sqrt(1.0 - z * z);
      Vec d(3);
      d << rho * std::cos(golden * j), rho * std::sin(golden * j), z;
      out.push_back(d);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int j = 0; j < count; ++j) {
      Vec d(n);
      for (int i = 0; i < n; ++i) d[i] = normal(rng);
      out.push_back(d / d.norm());
    }
  }
  return out;
}

NondegeneracyReport lambdaEstimate(const SpectralMeasure& mu, FractionalOrder s,
                                   const LambdaOptions& options) {
  const int n = mu.dimension();
  const double two_s = s.order();
  const double Lambda = mu.totalMass();
  const auto nodes = mu.foldedNodes();
  auto finish = [&](double value, Vec argmin, MinimizationMethod method,
                    double holder, int candidates) {
    return NondegeneracyReport{
        .lambdaLower = value,
        .LambdaUpper = Lambda,
        .argminDirection = Direction::normalized(canonicalSign(snap(argmin))),
        .method = method,
        .degenerate = value <= options.degenerateTol * std::max(Lambda, 1.0),
        .holderLowerBound = holder,
        .candidates = candidates};
  };

  if (n == 1 || nodes.empty()) {
    const Vec e1 = Vec::Unit(n, 0);
    const double value = moment(nodes, e1, two_s);
    return finish(value, e1, MinimizationMethod::Exact, value, 1);
  }

  // Coarse grid over a half-sphere (the objective is even in nu).
  std::vector<Vec> grid;
  double covering = 0.0;
  if (n == 2) {
    for (int j = 0; j < options.gridCount; ++j) {
      const double phi = kPi * j / options.gridCount;
      Vec d(2);
      d << std::cos(phi), std::sin(phi);
      grid.push_back(snap(d));
    }
    covering = kPi / (2.0 * options.gridCount);
  } else if (n == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < options.gridCount; ++j) {
      const double z = 1.0 - (j + 0.5) / options.gridCount;
      const double rho = std::sqrt(1.0 - z * z);
      Vec d(3);
      d << rho * std::cos(golden * j), rho * std::sin(golden * j), z;
      grid.push_back(d);
    }
    covering = std::sqrt(2.0 * kPi / options.gridCount);
  } else {
    grid = spreadDirections(n, options.gridCount, 0x5eedu);
  }

  std::vector<Vec> candidates = grid;
  if (mu.kind() == MeasureKind::Atomic) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Vec& a = nodes[i].direction;
      if (n == 2) {
        Vec perp(2);
        perp << -a[1], a[0];
        candidates.push_back(perp);
      } else if (n == 3) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
          const Eigen::Vector3d c =
              Eigen::Vector3d(a[0], a[1], a[2]).cross(Eigen::Vector3d(
                  nodes[j].direction[0], nodes[j].direction[1], nodes[j].direction[2]));
          if (c.norm() > 1e-12) candidates.push_back(Vec(c / c.norm()));
        }
        if (nodes.size() == 1) {
          const Eigen::Vector3d axis(a[0], a[1], a[2]);
          const Eigen::Vector3d helper =
              std::abs(axis[0]) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
          const Eigen::Vector3d c = axis.cross(helper);
          candidates.push_back(Vec(c / c.norm()));
        }
      }
    }
  }

  std::vector<double> values(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    values[i] = moment(nodes, candidates[i], two_s);
  }
  double gridMin = HUGE_VAL;
  for (std::size_t i = 0; i < grid.size(); ++i) gridMin = std::min(gridMin, values[i]);

  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double best = values[order[0]];
  Vec argmin = candidates[order[0]];

  auto objective = [&](const Vec& v) {
    const double norm = v.norm();
    if (!(norm > 0.0)) return HUGE_VAL;
    return moment(nodes, v / norm, two_s);
  };
  const double step = n == 2 ? kPi / options.gridCount : std::max(covering, 1e-3);
  const int starts = std::min<int>(options.polishStarts, static_cast<int>(order.size()));
  for (int k = 0; k < starts; ++k) {
    SimplexOptions simplex;
    simplex.initialStep = step;
    simplex.xTol = 1e-15;
    simplex.fTol = 0.0;
    simplex.maxIterations = 4000;
    const auto polished = nelderMead(objective, candidates[order[k]], simplex);
    if (polished.value < best) {
      best = polished.value;
      argmin = polished.x / polished.x.norm();
    }
  }

  double holder = 0.0;
  if (n <= 3) {
    const double modulus = two_s <= 1.0 ? std::pow(covering, two_s) : two_s * covering;
    holder = std::max(0.0, gridMin - Lambda * modulus);
  }
  return finish(best, argmin, MinimizationMethod::GridAndSimplex, holder,
                static_cast<int>(candidates.size()));
}

}  // namespace nonlocal
