#include "nonlocal/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nonlocal/errors.hpp"
#include "nonlocal/operator.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {
namespace {

void requireExponent(double gamma, FractionalOrder s) {
  if (!(gamma > 0.0 && gamma < s.order())) {
    std::ostringstream msg;
    msg << "exponent must satisfy γ ∈ (0, 2s); got gamma = " << gamma
        << " with 2s = " << s.order();
    throw DomainError(msg.str());
  }
}

[[noreturn]] void hypothesisFailure(const std::string& what, const Vec& x) {
  std::ostringstream msg;
  msg << "lemma hypothesis violated: " << what << " at x = (";
  for (Eigen::Index i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
  msg << ")";
  throw PreconditionFailure(msg.str(), x);
}

// Second directional difference quotients at steps h and h/2 must agree to
// 10% (plus a rounding allowance), which fails near kinks and cusps.
void checkC2(const ScalarField& u, int n) {
  const auto dirs = spreadDirections(n, 16, 0);
  constexpr double h = 1e-3;
  for (int i = 0; i <= 30; ++i) {
    const double rho = 3.0 * i / 30.0;
    for (const Vec& d : dirs) {
      const Vec x = rho * d;
      for (const Vec& e : dirs) {
        const double ux = u(x);
        const double a = u.secondDifference(x, h * e) / (h * h);
        const double b = u.secondDifference(x, 0.5 * h * e) / (0.25 * h * h);
        const double allowance = 1e-6 * (1.0 + std::abs(ux)) + 1e-10 * std::abs(ux) / (h * h);
        if (std::abs(a - b) > 0.1 * std::max(std::abs(a), std::abs(b)) + allowance) {
          hypothesisFailure("u is not C^2 on B_3", x);
        }
      }
      if (rho == 0.0) break;
    }
  }
}

void checkPowerEnvelope(const ScalarField& u, double gamma, int n, bool exactOutside) {
  const auto dirs = spreadDirections(n, 32, 0);
  for (int i = 0; i <= 400; ++i) {
    // Radii in [0, 2] uniformly, then log-spaced up to 10^3.
    const double rho = i <= 200 ? 2.0 * i / 200.0 : 2.0 * std::pow(500.0, (i - 200) / 200.0);
    for (const Vec& d : dirs) {
      const Vec x = rho * d;
      const double v = u(x);
      const double cap = std::pow(x.norm(), gamma);
      if (!(v >= 0.0) || v > cap * (1.0 + 1e-14)) {
        hypothesisFailure("0 <= v <= |x|^gamma", x);
      }
      if (exactOutside && x.norm() >= 1.0 && std::abs(v - cap) > 1e-14 * cap) {
        hypothesisFailure("v = |x|^gamma outside B_1", x);
      }
      if (rho == 0.0) break;
    }
  }
}

}  // namespace

std::string toString(LemmaId id) {
  switch (id) {
    case LemmaId::P1: return "P1";
    case LemmaId::P2: return "P2";
    case LemmaId::P3: return "P3";
  }
  return "?";
}

LemmaId parseLemmaId(const std::string& text) {
  if (text == "P1") return LemmaId::P1;
  if (text == "P2") return LemmaId::P2;
  if (text == "P3") return LemmaId::P3;
  throw DomainError("lemma id must be P1, P2 or P3");
}

double lemmaP1Constant(double M, const SpectralMeasure& mu, FractionalOrder s) {
  if (!(M >= 0.0)) throw DomainError("Hessian bound must be >= 0");
  const double Lambda = mu.totalMass();
  if (M == 0.0 || Lambda == 0.0) return 0.0;
  return Lambda * M / (1.0 - s.value());
}

double lemmaP2Constant(double gamma, const SpectralMeasure& mu, FractionalOrder s) {
  requireExponent(gamma, s);
  const double Lambda = mu.totalMass();
  return (std::pow(2.0, gamma + 1.0) + 2.0) * Lambda * 2.0 / (s.order() - gamma);
}

double lemmaP3OuterIntegral(double gamma, FractionalOrder s) {
  requireExponent(gamma, s);
  // rho = 1/t: int_0^2 (1 + t)^gamma t^{alpha-1} dt with alpha = 2s - gamma,
  // of which int_0^2 t^{alpha-1} dt = 2^alpha / alpha exactly.
  const double alpha = s.order() - gamma;
  auto rest = [=](double t) {
    return std::expm1(gamma * std::log1p(t)) * std::pow(t, alpha - 1.0);
  };
  std::vector<double> breaks{0.0};
  for (int k = 40; k >= 0; --k) breaks.push_back(2.0 * std::ldexp(1.0, -k));
  const QuadResult q = integrate(rest, breaks, Tolerance{1e-15, 1e-14});
  return std::pow(2.0, alpha) / alpha + q.value;
}

double lemmaP3Constant(double gamma, const SpectralMeasure& mu, FractionalOrder s) {
  requireExponent(gamma, s);
  const double Lambda = mu.totalMass();
  if (Lambda == 0.0) return 0.0;
  const double p = 2.0 - s.order();
  const double Ch = std::pow(2.0, 2.0 - gamma) * gamma * (std::abs(gamma - 2.0) + 1.0);
  const double inner = Ch * 2.0 * std::pow(0.5, p) / p;
  const double outer = 4.0 * lemmaP3OuterIntegral(gamma, s);
  return Lambda * (inner + outer);
}

std::vector<Vec> lemmaSamplePoints(LemmaId id, int n, const SampleSpec& sample) {
  if (sample.points < 2) throw DomainError("lemma sample needs at least 2 points");
  if (!(sample.maxRadius > 1.0)) throw DomainError("lemma sample maxRadius must exceed 1");
  const auto dirs = spreadDirections(n, sample.points, sample.seed);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(sample.points));
  for (int i = 0; i < sample.points; ++i) {
    const double t = static_cast<double>(i) / (sample.points - 1);
    const double rho = id == LemmaId::P3 ? std::pow(sample.maxRadius, t)
                                         : static_cast<double>(i) / sample.points;
    out.push_back(rho * dirs[static_cast<std::size_t>(i)]);
  }
  return out;
}

LemmaReport verifyLemma(LemmaId id, const ScalarField& field, double gamma,
                        const SpectralMeasure& mu, FractionalOrder s,
                        const SampleSpec& sample, Tolerance tol) {
  const int n = field.dimension();
  if (mu.dimension() != n) throw DomainError("field and measure dimensions differ");

  LemmaReport report;
  report.lemmaId = id;
  switch (id) {
    case LemmaId::P1:
      checkC2(field, n);
      report.analyticC = lemmaP1Constant(field.node().hessianBound(Vec::Zero(n), 2.0), mu, s);
      break;
    case LemmaId::P2:
      requireExponent(gamma, s);
      checkPowerEnvelope(field, gamma, n, false);
      report.analyticC = lemmaP2Constant(gamma, mu, s);
      break;
    case LemmaId::P3:
      requireExponent(gamma, s);
      checkPowerEnvelope(field, gamma, n, true);
      report.analyticC = lemmaP3Constant(gamma, mu, s);
      break;
  }

  const auto points = lemmaSamplePoints(id, n, sample);
  report.empiricalSup = -std::numeric_limits<double>::infinity();
  report.worstPoint = points.front();
  for (const Vec& x : points) {
    OperatorEval e;
    double value = 0.0;
    switch (id) {
      case LemmaId::P1:
        e = evalI1(field, x, mu, s, tol);
        value = std::abs(e.value);
        break;
      case LemmaId::P2:
        e = evalI2(field, x, mu, s, tol);
        value = std::abs(e.value);
        break;
      case LemmaId::P3:
        e = evalI(field, x, mu, s, tol);
        value = e.value;
        break;
    }
    if (value > report.empiricalSup) {
      report.empiricalSup = value;
      report.worstPoint = x;
      report.budgetAtWorst = e.budget();
    }
  }
  report.samplePoints = static_cast<int>(points.size());
  report.pass = report.empiricalSup <= report.analyticC + report.budgetAtWorst;
  return report;
}

}  // namespace nonlocal
