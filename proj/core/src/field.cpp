#include "nonlocal/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "nonlocal/errors.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void requireDimension(const Vec& x, int n) {
  if (x.size() != n) throw DomainError("point has the wrong dimension");
}

// c with (a + b)^kappa <= c (a^kappa + b^kappa).
double subadditiveFactor(double kappa) {
  return std::max(1.0, std::pow(2.0, kappa - 1.0));
}

class AffineNode final : public FieldNode {
 public:
  AffineNode(Vec slope, double offset)
      : FieldNode(static_cast<int>(slope.size()), growthOf(slope, offset)),
        slope_(std::move(slope)),
        offset_(offset) {}

  std::string family() const override { return "affine"; }
  double value(const Vec& x) const override { return slope_.dot(x) + offset_; }
  double secondDifference(const Vec& x, const Vec& y) const override {
    const double a = value(x);
    const double b = slope_.dot(y);
    return (a + b) + (a - b) - 2.0 * a;
  }
  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    const double a = value(x);
    const double b = slope_.dot(dir);
    return {[a, b](double r) { return (a + b * r) + (a - b * r) - 2.0 * a; }, true};
  }
  double hessianBound(const Vec&, double) const override { return 0.0; }
  std::optional<TailPiece> tail(const Vec&, const Vec&, double,
                                FractionalOrder) const override {
    return TailPiece{0.0, 0.0};
  }

 private:
  static GrowthBound growthOf(const Vec& slope, double offset) {
    const double norm = slope.norm();
    if (norm == 0.0) return {std::abs(offset), 0.0};
    return {std::max(norm, std::abs(offset)), 1.0};
  }

  Vec slope_;
  double offset_;
};

class QuadraticNode final : public FieldNode {
 public:
  explicit QuadraticNode(Mat A)
      : FieldNode(static_cast<int>(A.rows()), {spectralNorm(A), 2.0}),
        A_(std::move(A)),
        norm_(spectralNorm(A_)) {}

  std::string family() const override { return "quadratic"; }
  double value(const Vec& x) const override { return x.dot(A_ * x); }
  double secondDifference(const Vec&, const Vec& y) const override {
    return 2.0 * y.dot(A_ * y);
  }
  RadialSlice slice(const Vec&, const Vec& dir) const override {
    const double q = dir.dot(A_ * dir);
    return {[q](double r) { return 2.0 * q * r * r; }, true};
  }
  double hessianBound(const Vec&, double) const override { return 2.0 * norm_; }

 private:
  static double spectralNorm(const Mat& A) {
    return Eigen::JacobiSVD<Mat>(A).singularValues()(0);
  }

  Mat A_;
  double norm_;
};

// sum_j a_j cos(xi_j . x + phi_j)
class CosineSumNode final : public FieldNode {
 public:
  CosineSumNode(Mat freq, std::vector<double> amp, std::vector<double> phase,
                std::string family)
      : FieldNode(static_cast<int>(freq.rows()), growthOf(amp)),
        freq_(std::move(freq)),
        amp_(std::move(amp)),
        phase_(std::move(phase)),
        family_(std::move(family)) {
    hess_ = 0.0;
    for (std::size_t j = 0; j < amp_.size(); ++j) {
      hess_ += std::abs(amp_[j]) * freq_.col(static_cast<Eigen::Index>(j)).squaredNorm();
    }
  }

  std::string family() const override { return family_; }
  double value(const Vec& x) const override {
    const Vec arg = freq_.transpose() * x;
    double total = 0.0;
    for (std::size_t j = 0; j < amp_.size(); ++j) {
      total += amp_[j] * std::cos(arg[static_cast<Eigen::Index>(j)] + phase_[j]);
    }
    return total;
  }
  double secondDifference(const Vec& x, const Vec& y) const override {
    const Vec arg = freq_.transpose() * x;
    const Vec om = freq_.transpose() * y;
    double total = 0.0;
    for (std::size_t j = 0; j < amp_.size(); ++j) {
      const auto i = static_cast<Eigen::Index>(j);
      const double half = std::sin(0.5 * om[i]);
      total += -4.0 * amp_[j] * std::cos(arg[i] + phase_[j]) * half * half;
    }
    return total;
  }
  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    auto [c, omega] = coefficients(x, dir);
    return {[c = std::move(c), omega = std::move(omega)](double r) {
              double total = 0.0;
              for (std::size_t j = 0; j < c.size(); ++j) {
                const double half = std::sin(0.5 * omega[j] * r);
                total += -4.0 * c[j] * half * half;
              }
              return total;
            },
            true};
  }
  double hessianBound(const Vec&, double) const override { return hess_; }
  std::optional<TailPiece> tail(const Vec& x, const Vec& dir, double R,
                                FractionalOrder s) const override {
    const auto [c, omega] = coefficients(x, dir);
    TailPiece out;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j] == 0.0) continue;
      const QuadResult t = cosineTailIntegral(omega[j], R, s);
      out.value += 2.0 * c[j] * t.value;
      out.error += 2.0 * std::abs(c[j]) * t.error;
    }
    return out;
  }

 private:
  static GrowthBound growthOf(const std::vector<double>& amp) {
    double total = 0.0;
    for (double a : amp) total += std::abs(a);
    return {0.5 * total, 0.0};
  }

  // Slice coefficients: delta(r) = sum_j -4 c_j sin^2(omega_j r / 2).
  std::pair<std::vector<double>, std::vector<double>> coefficients(
      const Vec& x, const Vec& dir) const {
    const Vec arg = freq_.transpose() * x;
    const Vec om = freq_.transpose() * dir;
    std::vector<double> c(amp_.size());
    std::vector<double> omega(amp_.size());
    for (std::size_t j = 0; j < amp_.size(); ++j) {
      const auto i = static_cast<Eigen::Index>(j);
      c[j] = amp_[j] * std::cos(arg[i] + phase_[j]);
      omega[j] = om[i];
    }
    return {std::move(c), std::move(omega)};
  }

  Mat freq_;
  std::vector<double> amp_;
  std::vector<double> phase_;
  std::string family_;
  double hess_;
};

class PurePowerNode final : public FieldNode {
 public:
  PurePowerNode(int n, double gamma) : FieldNode(n, {1.0, gamma}), gamma_(gamma) {}

  std::string family() const override { return "purePower"; }
  double value(const Vec& x) const override { return std::pow(x.norm(), gamma_); }
  double secondDifference(const Vec& x, const Vec& y) const override {
    return powerSecondDifference(x, y, gamma_);
  }
  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    return {[x, dir, g = gamma_](double r) {
              return powerSecondDifference(x, Vec(r * dir), g);
            },
            true};
  }
  double hessianBound(const Vec& x, double radius) const override {
    return powerHessianBound(x, radius, gamma_);
  }
  std::vector<double> radialBreakpoints(const Vec& x, const Vec& dir) const override {
    const double r = std::abs(x.dot(dir));
    if (r > 0.0) return {r};
    return {};
  }
  double tailStart(const Vec& x, const Vec&) const override {
    return std::max(1.0, 2.0 * x.norm());
  }
  std::optional<TailPiece> tail(const Vec& x, const Vec& dir, double R,
                                FractionalOrder s) const override {
    return powerTail(x, dir, R, gamma_, s);
  }

 private:
  double gamma_;
};

class SumNode final : public FieldNode {
 public:
  SumNode(int n, std::vector<ScalarField::Term> terms)
      : FieldNode(n, growthOf(terms)), terms_(std::move(terms)) {}

  std::string family() const override { return "sum"; }
  double value(const Vec& x) const override {
    double total = 0.0;
    for (const auto& t : terms_) total += t.weight * t.field(x);
    return total;
  }
  double secondDifference(const Vec& x, const Vec& y) const override {
    double total = 0.0;
    for (const auto& t : terms_) total += t.weight * t.field.secondDifference(x, y);
    return total;
  }
  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    std::vector<std::pair<double, std::function<double(double)>>> parts;
    bool stable = true;
    double roundoff = 0.0;
    for (const auto& t : terms_) {
      RadialSlice child = t.field.node().slice(x, dir);
      stable = stable && child.stable;
      roundoff += std::abs(t.weight) * child.roundoff;
      parts.emplace_back(t.weight, std::move(child.delta));
    }
    return {[parts = std::move(parts)](double r) {
              double total = 0.0;
              for (const auto& [w, f] : parts) total += w * f(r);
              return total;
            },
            stable, roundoff};
  }
  double hessianBound(const Vec& x, double radius) const override {
    double total = 0.0;
    for (const auto& t : terms_) {
      if (t.weight != 0.0) total += std::abs(t.weight) * t.field.node().hessianBound(x, radius);
    }
    return total;
  }
  std::vector<double> radialBreakpoints(const Vec& x, const Vec& dir) const override {
    std::vector<double> out;
    for (const auto& t : terms_) {
      auto child = t.field.node().radialBreakpoints(x, dir);
      out.insert(out.end(), child.begin(), child.end());
    }
    return out;
  }
  double tailStart(const Vec& x, const Vec& dir) const override {
    double R = 1.0;
    for (const auto& t : terms_) R = std::max(R, t.field.node().tailStart(x, dir));
    return R;
  }
  std::optional<TailPiece> tail(const Vec& x, const Vec& dir, double R,
                                FractionalOrder s) const override {
    TailPiece out;
    for (const auto& t : terms_) {
      if (t.weight == 0.0) continue;
      const auto child = t.field.node().tail(x, dir, R, s);
      if (!child) return std::nullopt;
      out.value += t.weight * child->value;
      out.error += std::abs(t.weight) * child->error;
    }
    return out;
  }

 private:
  static GrowthBound growthOf(const std::vector<ScalarField::Term>& terms) {
    double kappa = 0.0;
    bool uniform = true;
    for (const auto& t : terms) {
      if (!terms.empty() && t.field.growth().kappa != terms.front().field.growth().kappa) {
        uniform = false;
      }
      kappa = std::max(kappa, t.field.growth().kappa);
    }
    double K = 0.0;
    for (const auto& t : terms) K += std::abs(t.weight) * t.field.growth().K;
    return {uniform ? K : 2.0 * K, kappa};
  }

  std::vector<ScalarField::Term> terms_;
};

class TranslatedNode final : public FieldNode {
 public:
  TranslatedNode(ScalarField inner, Vec shift)
      : FieldNode(inner.dimension(), growthOf(inner.growth(), shift)),
        inner_(std::move(inner)),
        shift_(std::move(shift)) {}

  std::string family() const override { return "translated"; }
  double value(const Vec& x) const override { return inner_(x + shift_); }
  double secondDifference(const Vec& x, const Vec& y) const override {
    return inner_.secondDifference(x + shift_, y);
  }
  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    return inner_.node().slice(x + shift_, dir);
  }
  double hessianBound(const Vec& x, double radius) const override {
    return inner_.node().hessianBound(x + shift_, radius);
  }
  std::vector<double> radialBreakpoints(const Vec& x, const Vec& dir) const override {
    return inner_.node().radialBreakpoints(x + shift_, dir);
  }
  double tailStart(const Vec& x, const Vec& dir) const override {
    return inner_.node().tailStart(x + shift_, dir);
  }
  std::optional<TailPiece> tail(const Vec& x, const Vec& dir, double R,
                                FractionalOrder s) const override {
    return inner_.node().tail(x + shift_, dir, R, s);
  }

 private:
  static GrowthBound growthOf(GrowthBound g, const Vec& shift) {
    if (g.kappa == 0.0) return g;
    const double c = subadditiveFactor(g.kappa);
    return {g.K * std::max(1.0 + c * std::pow(shift.norm(), g.kappa), c), g.kappa};
  }

  ScalarField inner_;
  Vec shift_;
};

class RotatedNode final : public FieldNode {
 public:
  RotatedNode(ScalarField inner, Mat Q)
      : FieldNode(inner.dimension(), inner.growth()),
        inner_(std::move(inner)),
        Q_(std::move(Q)) {}

  std::string family() const override { return "rotated"; }
  double value(const Vec& x) const override { return inner_(Q_ * x); }
  double secondDifference(const Vec& x, const Vec& y) const override {
    return inner_.secondDifference(Q_ * x, Q_ * y);
  }
  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    return inner_.node().slice(Q_ * x, Q_ * dir);
  }
  double hessianBound(const Vec& x, double radius) const override {
    return inner_.node().hessianBound(Q_ * x, radius);
  }
  std::vector<double> radialBreakpoints(const Vec& x, const Vec& dir) const override {
    return inner_.node().radialBreakpoints(Q_ * x, Q_ * dir);
  }
  double tailStart(const Vec& x, const Vec& dir) const override {
    return inner_.node().tailStart(Q_ * x, Q_ * dir);
  }
  std::optional<TailPiece> tail(const Vec& x, const Vec& dir, double R,
                                FractionalOrder s) const override {
    return inner_.node().tail(Q_ * x, Q_ * dir, R, s);
  }

 private:
  ScalarField inner_;
  Mat Q_;
};

// Forwards everything except the growth bound.
class DeclaredGrowthNode final : public FieldNode {
 public:
  DeclaredGrowthNode(ScalarField inner, GrowthBound growth)
      : FieldNode(inner.dimension(), growth), inner_(std::move(inner)) {}

  std::string family() const override { return inner_.family(); }
  double value(const Vec& x) const override { return inner_(x); }
  double secondDifference(const Vec& x, const Vec& y) const override {
    return inner_.secondDifference(x, y);
  }
  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    return inner_.node().slice(x, dir);
  }
  double hessianBound(const Vec& x, double radius) const override {
    return inner_.node().hessianBound(x, radius);
  }
  std::vector<double> radialBreakpoints(const Vec& x, const Vec& dir) const override {
    return inner_.node().radialBreakpoints(x, dir);
  }
  double tailStart(const Vec& x, const Vec& dir) const override {
    return inner_.node().tailStart(x, dir);
  }
  std::optional<TailPiece> tail(const Vec& x, const Vec& dir, double R,
                                FractionalOrder s) const override {
    return inner_.node().tail(x, dir, R, s);
  }

 private:
  ScalarField inner_;
};

}  // namespace

double FieldNode::secondDifference(const Vec& x, const Vec& y) const {
  return value(x + y) + value(x - y) - 2.0 * value(x);
}

RadialSlice FieldNode::slice(const Vec& x, const Vec& dir) const {
  const double center = value(x);
  return {[this, x, dir, center](double r) {
            const Vec y = r * dir;
            return value(x + y) + value(x - y) - 2.0 * center;
          },
          false};
}

double FieldNode::hessianBound(const Vec& x, double radius) const {
  const double h = std::clamp(radius, 1e-4, 0.25);
  const auto n = x.size();
  Mat H(n, n);
  const double fx = value(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Vec ei = Vec::Zero(n);
      Vec ej = Vec::Zero(n);
      ei[i] = h;
      ej[j] = h;
      double hij;
      if (i == j) {
        hij = (value(x + ei) + value(x - ei) - 2.0 * fx) / (h * h);
      } else {
        hij = (value(x + ei + ej) - value(x + ei - ej) - value(x - ei + ej) +
               value(x - ei - ej)) /
              (4.0 * h * h);
      }
      H(i, j) = hij;
      H(j, i) = hij;
    }
  }
  return 1.5 * H.norm();
}

std::vector<double> FieldNode::radialBreakpoints(const Vec&, const Vec&) const {
  return {};
}

double FieldNode::tailStart(const Vec&, const Vec&) const { return 1.0; }

std::optional<TailPiece> FieldNode::tail(const Vec&, const Vec&, double,
                                         FractionalOrder) const {
  return std::nullopt;
}

ScalarField::ScalarField(std::shared_ptr<const FieldNode> node)
    : node_(std::move(node)) {
  if (!node_) throw DomainError("scalar field needs an implementation");
}

ScalarField ScalarField::affine(Vec slope, double offset) {
  if (slope.size() < 1) throw DomainError("affine field needs n >= 1");
  return ScalarField(std::make_shared<AffineNode>(std::move(slope), offset));
}

ScalarField ScalarField::constant(int n, double c) {
  return affine(Vec::Zero(n), c);
}

ScalarField ScalarField::quadratic(Mat A) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw DomainError("quadratic field needs a square matrix");
  }
  if ((A - A.transpose()).norm() > 1e-12 * std::max(1.0, A.norm())) {
    throw DomainError("quadratic field needs a symmetric matrix");
  }
  return ScalarField(std::make_shared<QuadraticNode>(std::move(A)));
}

ScalarField ScalarField::cosine(Vec frequency, double amplitude, double phase) {
  const auto n = frequency.size();
  Mat freq(n, 1);
  freq.col(0) = frequency;
  return ScalarField(std::make_shared<CosineSumNode>(
      std::move(freq), std::vector<double>{amplitude}, std::vector<double>{phase},
      "cosine"));
}

ScalarField ScalarField::cosineSum(Mat frequencies, std::vector<double> amplitudes,
                                   std::vector<double> phases) {
  if (static_cast<std::size_t>(frequencies.cols()) != amplitudes.size() ||
      amplitudes.size() != phases.size()) {
    throw DomainError("cosine sum needs one amplitude and phase per frequency");
  }
  return ScalarField(std::make_shared<CosineSumNode>(
      std::move(frequencies), std::move(amplitudes), std::move(phases), "cosineSum"));
}

ScalarField ScalarField::purePower(int n, double gamma) {
  if (!(gamma > 0.0) || !(gamma < 2.0)) {
    throw DomainError("pure power exponent must lie in (0, 2)");
  }
  return ScalarField(std::make_shared<PurePowerNode>(n, gamma));
}

ScalarField ScalarField::sum(std::vector<Term> terms) {
  if (terms.empty()) throw DomainError("sum needs at least one term");
  const int n = terms.front().field.dimension();
  for (const auto& t : terms) {
    if (t.field.dimension() != n) throw DomainError("sum terms differ in dimension");
    if (!std::isfinite(t.weight)) throw DomainError("sum weights must be finite");
  }
  return ScalarField(std::make_shared<SumNode>(n, std::move(terms)));
}

ScalarField ScalarField::translated(const Vec& shift) const {
  requireDimension(shift, dimension());
  return ScalarField(std::make_shared<TranslatedNode>(*this, shift));
}

ScalarField ScalarField::rotated(const Mat& Q) const {
  const auto n = dimension();
  if (Q.rows() != n || Q.cols() != n ||
      (Q.transpose() * Q - Mat::Identity(n, n)).norm() > 1e-10) {
    throw DomainError("rotation must be an orthogonal n x n matrix");
  }
  return ScalarField(std::make_shared<RotatedNode>(*this, Q));
}

ScalarField ScalarField::withGrowth(GrowthBound growth, std::uint64_t seed) const {
  if (!(growth.K >= 0.0) || !(growth.kappa >= 0.0)) {
    throw DomainError("growth bound needs K >= 0 and kappa >= 0");
  }
  ScalarField out(std::make_shared<DeclaredGrowthNode>(*this, growth));
  checkGrowth(out, seed);
  return out;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return ScalarField::sum({{1.0, a}, {1.0, b}});
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return ScalarField::sum({{1.0, a}, {-1.0, b}});
}

ScalarField operator*(double weight, const ScalarField& u) {
  return ScalarField::sum({{weight, u}});
}

void checkGrowth(const ScalarField& u, std::uint64_t seed, int count, double radius) {
  const int n = u.dimension();
  const GrowthBound g = u.growth();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = normal(rng);
    const double norm = d.norm();
    const Vec x = norm > 0.0 ? Vec(d * (radius * uniform(rng) / norm)) : Vec::Zero(n);
    const double value = u(x);
    const double bound = g.K * (1.0 + std::pow(x.norm(), g.kappa));
    if (!std::isfinite(value) || std::abs(value) > bound * (1.0 + 1e-12) + 1e-300) {
      std::ostringstream msg;
      msg << "declared growth bound K = " << g.K << ", kappa = " << g.kappa
          << " fails at |x| = " << x.norm() << " where |u| = " << std::abs(value);
      throw DomainError(msg.str());
    }
  }
}

double powerSecondDifference(const Vec& x, const Vec& y, double gamma) {
  const double nx2 = x.squaredNorm();
  const double ny2 = y.squaredNorm();
  if (nx2 == 0.0) return 2.0 * std::pow(ny2, 0.5 * gamma);
  const double w = ny2 / nx2;
  if (w > 1.0 / 16.0) {
    return std::pow((x + y).norm(), gamma) + std::pow((x - y).norm(), gamma) -
           2.0 * std::pow(nx2, 0.5 * gamma);
  }
  // f(z) = (1+z)^beta - 1 and f(w+u) + f(w-u) = 2 sum_k f^(2k)(w) u^2k/(2k)!
  const double u = 2.0 * x.dot(y) / nx2;
  const double beta = 0.5 * gamma;
  const double base = 1.0 + w;
  double total = std::expm1(beta * std::log1p(w));
  double coef = 1.0;  // beta (beta-1) ... (beta-j+1) / j!
  double power = 1.0;  // (u / base)^j
  for (int j = 1; j <= 400; ++j) {
    coef *= (beta - j + 1.0) / j;
    power *= u / base;
    if (j % 2 == 1) continue;
    const double term = coef * power * std::pow(base, beta);
    total += term;
    if (std::abs(term) <= 1e-18 * std::abs(total)) break;
    if (term == 0.0) break;
  }
  return 2.0 * std::pow(nx2, 0.5 * gamma) * total;
}

TailPiece powerTail(const Vec& x, const Vec& dir, double R, double gamma,
                    FractionalOrder s) {
  const double two_s = s.order();
  const double alpha = two_s - gamma;
  if (!(alpha > 0.0)) {
    throw DivergentTailError("pure power tail needs gamma < 2s");
  }
  const double normX = x.norm();
  if (R < 2.0 * normX * (1.0 - 1e-12)) {
    throw DomainError("pure power tail requires R >= 2|x|");
  }
  // t = 1/r: int_0^{1/R} [t^{-gamma} p(t) - 2|x|^gamma] t^{2s-1} dt with
  // p(t) = 2 + q(t), q the second difference of |.|^gamma at dir.
  const double T = 1.0 / R;
  double value = 2.0 * std::pow(T, alpha) / alpha -
                 2.0 * std::pow(normX, gamma) * std::pow(T, two_s) / two_s;
  double error = 0.0;
  if (normX > 0.0) {
    auto integrand = [&](double t) {
      if (t == 0.0) return 0.0;
      return std::pow(t, alpha - 1.0) * powerSecondDifference(dir, Vec(t * x), gamma);
    };
    std::vector<double> breaks{0.0};
    for (int k = 40; k >= 1; --k) breaks.push_back(T * std::ldexp(1.0, -k));
    breaks.push_back(T);
    const double scale = std::pow(T, alpha);
    const QuadResult rem = integrate(integrand, breaks, Tolerance{1e-16 * scale, 1e-13});
    value += rem.value;
    error += rem.error;
  }
  return {value, error};
}

double powerHessianBound(const Vec& x, double radius, double gamma) {
  const double dist = x.norm() - radius;
  if (!(dist > 0.0)) return kInf;
  return gamma * std::max(std::abs(gamma - 1.0), 1.0) * std::pow(dist, gamma - 2.0);
}

}  // namespace nonlocal
