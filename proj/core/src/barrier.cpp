#include "nonlocal/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <quadmath.h>

#include "nonlocal/errors.hpp"
#include "nonlocal/lemmas.hpp"
#include "nonlocal/operator.hpp"

namespace nonlocal {
namespace {

constexpr double kInner = 0.5;
constexpr double kOuter = 1.0;
// Below this step the transition-zone difference is evaluated in quad precision.
constexpr double kQuadBelow = 1e-3;
// Quad rounding of that difference; the profile values are at most 1 there.
constexpr double kQuadRoundoff = 1e-32;

double profile(double rho, double gamma) {
  const CutoffProfile phi;
  return (1.0 - phi(rho)) * std::pow(rho, gamma);
}

__extension__ typedef __float128 quad;

quad profileQuad(quad rho, quad gamma) {
  if (rho <= 0) return 0;
  const quad a = 1 - rho > 0 ? expq(-1 / (1 - rho)) : 0;
  const quad half = 0.5;
  const quad b = rho - half > 0 ? expq(-1 / (rho - half)) : 0;
  return (1 - a / (a + b)) * powq(rho, gamma);
}

// Second difference of the profile in quad precision. In the transition
// annulus the double version cancels to eps/r^2 relative accuracy.
class QuadSlice {
 public:
  QuadSlice(const Vec& x, const Vec& dir, double gamma) : gamma_(gamma) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x2_ += static_cast<quad>(x[i]) * x[i];
      xd_ += static_cast<quad>(x[i]) * dir[i];
      d2_ += static_cast<quad>(dir[i]) * dir[i];
    }
    center_ = 2 * profileQuad(sqrtq(x2_), gamma_);
  }

  double operator()(double r) const {
    const quad rq = r;
    const quad plus = sqrtq(x2_ + 2 * rq * xd_ + rq * rq * d2_);
    const quad minus = sqrtq(fmaxq(x2_ - 2 * rq * xd_ + rq * rq * d2_, 0));
    return static_cast<double>(profileQuad(plus, gamma_) + profileQuad(minus, gamma_) -
                               center_);
  }

 private:
  quad gamma_;
  quad x2_ = 0;
  quad xd_ = 0;
  quad d2_ = 0;
  quad center_ = 0;
};

// Sup of |D^2 v| per radial bin of width 2/kBins on [0, 2]. The
// eigenvalues of the Hessian of a radial function are V'' and V'/rho.
constexpr int kBins = 1000;

std::vector<double> hessianBins(double gamma) {
  constexpr int kPerBin = 4;
  constexpr double h = 1e-4;
  std::vector<double> bins(kBins, 0.0);
  for (int i = 0; i <= kBins * kPerBin; ++i) {
    const double rho = 2.0 * i / (kBins * kPerBin);
    if (rho - h <= 0.0) continue;
    const double vm = profile(rho - h, gamma);
    const double v0 = profile(rho, gamma);
    const double vp = profile(rho + h, gamma);
    const double d2 = std::abs(vp - 2.0 * v0 + vm) / (h * h);
    const double d1 = std::abs(vp - vm) / (2.0 * h) / rho;
    // A sample on a bin edge counts for both neighbours.
    const int hi = std::min(kBins - 1, i / kPerBin);
    const int lo = i % kPerBin == 0 ? std::max(0, hi - 1) : hi;
    for (int b = lo; b <= hi; ++b) bins[b] = std::max({bins[b], d2, d1});
  }
  for (double& b : bins) b *= 1.5;
  return bins;
}

double powerBoundFrom(double rho, double gamma) {
  return gamma * std::max(std::abs(gamma - 1.0), 1.0) * std::pow(rho, gamma - 2.0);
}

class BarrierNode final : public FieldNode {
 public:
  BarrierNode(int n, double gamma, std::vector<double> bins)
      : FieldNode(n, {1.0, gamma}), gamma_(gamma), bins_(std::move(bins)) {}

  std::string family() const override { return "barrier"; }

  double value(const Vec& x) const override { return profile(x.norm(), gamma_); }

  RadialSlice slice(const Vec& x, const Vec& dir) const override {
    const double rho = x.norm();
    const double center = value(x);
    const bool transition = rho > kInner - kQuadBelow && rho < kOuter + kQuadBelow;
    std::optional<QuadSlice> precise;
    if (transition) precise.emplace(x, dir, gamma_);
    return {[this, x, dir, rho, center, precise](double r) {
              if (rho >= kOuter + r) return powerSecondDifference(x, Vec(r * dir), gamma_);
              if (rho + r <= kInner) return 0.0;
              if (precise && r < kQuadBelow) return (*precise)(r);
              return value(x + r * dir) + value(x - r * dir) - 2.0 * center;
            },
            true, precise ? kQuadRoundoff : 0.0};
  }

  double hessianBound(const Vec& x, double radius) const override {
    const double rho = x.norm();
    if (rho - radius >= kOuter) return powerHessianBound(x, radius, gamma_);
    if (rho + radius <= kInner) return 0.0;
    const double lo = std::max(0.0, rho - radius);
    const double hi = rho + radius;
    double bound = 0.0;
    const int first = static_cast<int>(lo * kBins / 2.0);
    const int last = std::min(kBins - 1, static_cast<int>(hi * kBins / 2.0));
    for (int b = first; b <= last; ++b) bound = std::max(bound, bins_[b]);
    if (hi > kOuter) bound = std::max(bound, powerBoundFrom(std::max(lo, kOuter), gamma_));
    return bound;
  }

  double sup() const { return hessianBound(Vec::Zero(dimension()), 2.0); }

  std::vector<double> radialBreakpoints(const Vec& x, const Vec& dir) const override {
    std::vector<double> out;
    const double b = x.dot(dir);
    const double x2 = x.squaredNorm();
    for (double level : {kInner, kOuter}) {
      const double disc = b * b - x2 + level * level;
      if (disc < 0.0) continue;
      const double root = std::sqrt(disc);
      for (double r : {-b - root, -b + root, b - root, b + root}) {
        if (r > 0.0) out.push_back(r);
      }
    }
    const double kink = std::abs(b);
    if (kink > 0.0) out.push_back(kink);
    return out;
  }

  double tailStart(const Vec& x, const Vec&) const override {
    const double rho = x.norm();
    return std::max(rho + kOuter, 2.0 * rho);
  }

  std::optional<TailPiece> tail(const Vec& x, const Vec& dir, double R,
                                FractionalOrder s) const override {
    // Beyond R both points lie outside B_1, so v(x + y) + v(x - y) - 2v(x)
    // differs from the pure power only through the centre value.
    TailPiece out = powerTail(x, dir, R, gamma_, s);
    const double two_s = s.order();
    out.value += 2.0 * (std::pow(x.norm(), gamma_) - value(x)) * std::pow(R, -two_s) / two_s;
    return out;
  }

 private:
  double gamma_;
  std::vector<double> bins_;
};

[[noreturn]] void propertyFailure(const std::string& what, const Vec& x) {
  std::ostringstream msg;
  msg << "barrier property fails: " << what << " at |x| = " << x.norm();
  throw DomainError(msg.str());
}

void verifyProperties(const BarrierField& b) {
  const int n = b.dimension();
  const double gamma = b.gamma();
  const Vec origin = Vec::Zero(n);
  if (b(origin) != 0.0) propertyFailure("v(0) = 0", origin);

  const auto dirs = spreadDirections(n, 64, 0);
  for (int i = 0; i <= 1000; ++i) {
    const double rho = 2.0 * i / 1000.0;
    for (const Vec& d : dirs) {
      const Vec x = rho * d;
      const double v = b(x);
      const double cap = std::pow(x.norm(), gamma);
      if (!(v >= 0.0) || v > cap) propertyFailure("0 <= v <= |x|^gamma", x);
      if (x.norm() >= 1.0 && v != cap) propertyFailure("v = |x|^gamma outside B_1", x);
    }
  }
  for (double rho : {1.0, 1.0 + 1e-9, 10.0, 100.0}) {
    for (const Vec& d : dirs) {
      Vec x = rho * d;
      if (x.norm() < 1.0) x *= 1.0 + 1e-15;
      if (b(x) != std::pow(x.norm(), gamma)) {
        propertyFailure("v = |x|^gamma outside B_1", x);
      }
    }
  }
}

}  // namespace

double CutoffProfile::psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double CutoffProfile::operator()(double t) const {
  const double a = psi(1.0 - t);
  const double b = psi(t - 0.5);
  return a / (a + b);
}

BarrierField::BarrierField(double gamma, FractionalOrder s, ScalarField field,
                           double hessianSup)
    : gamma_(gamma), s_(s), field_(std::move(field)), hessianSup_(hessianSup) {}

BarrierField BarrierField::withCertifiedC(double C) const {
  BarrierField out = *this;
  out.certifiedC_ = C;
  return out;
}

BarrierField buildBarrier(double gamma, FractionalOrder s, int n) {
  if (!(gamma > 0.0 && gamma < s.order())) {
    std::ostringstream msg;
    msg << "barrier exponent must satisfy γ ∈ (0, 2s); got gamma = " << gamma
        << " with 2s = " << s.order();
    throw DomainError(msg.str());
  }
  if (n < 1) throw DomainError("barrier dimension must be >= 1");
  auto node = std::make_shared<BarrierNode>(n, gamma, hessianBins(gamma));
  const double sup = node->sup();
  BarrierField b(gamma, s, ScalarField(std::move(node)), sup);
  verifyProperties(b);
  return b;
}

BarrierCertificate certifyBarrier(const BarrierField& b, const SpectralMeasure& mu,
                                  FractionalOrder s, Tolerance tol) {
  if (mu.dimension() != b.dimension()) {
    throw DomainError("barrier and measure dimensions differ");
  }
  BarrierCertificate out;
  out.cInside = lemmaP1Constant(b.hessianSup(), mu, s) + lemmaP2Constant(b.gamma(), mu, s);
  out.cOutside = lemmaP3Constant(b.gamma(), mu, s);
  out.certifiedC = std::max(out.cInside, out.cOutside);

  const int n = b.dimension();
  constexpr int kSamples = 200;
  const auto dirs = spreadDirections(n, kSamples - 1, 0);
  out.worstPoint = Vec::Zero(n);
  out.sampledSup = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    Vec x = Vec::Zero(n);
    if (i > 0) {
      const double t = static_cast<double>(i - 1) / (kSamples - 2);
      x = std::pow(10.0, -3.0 + 6.0 * t) * dirs[static_cast<std::size_t>(i - 1)];
    }
    const OperatorEval e = evalI(b.field(), x, mu, s, tol);
    if (e.value > out.sampledSup) {
      out.sampledSup = e.value;
      out.worstPoint = x;
    }
    if (e.value - e.budget() > out.certifiedC) {
      std::ostringstream msg;
      msg << "sampled Iv = " << e.value << " exceeds the certified constant "
          << out.certifiedC << " at |x| = " << x.norm();
      throw CertificationFailure(msg.str(), x, e.value, out.certifiedC);
    }
  }
  out.samples = kSamples;
  return out;
}

double certifyBarrierC(const BarrierField& b, const SpectralMeasure& mu,
                       FractionalOrder s, Tolerance tol) {
  return certifyBarrier(b, mu, s, tol).certifiedC;
}

}  // namespace nonlocal
