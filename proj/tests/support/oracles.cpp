#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

double fractionalConstant(double s) {
  if (s == 0.5) return 2.0 * std::numbers::pi;
  return -4.0 * std::tgamma(-2.0 * s) * std::cos(std::numbers::pi * s);
}

double multiplier(const SpectralMeasure& mu, double s, const Vec& xi) {
  double sum = 0.0;
  for (const auto& node : mu.nodes()) {
    sum += node.weight * std::pow(std::abs(xi.dot(node.direction)), 2.0 * s);
  }
  return -fractionalConstant(s) * sum;
}

double lambdaOnCircle(const SpectralMeasure& mu, double s, int points) {
  double best = INFINITY;
  for (int i = 0; i < points; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / points;
    Vec nu(2);
    nu << std::cos(phi), std::sin(phi);
    double sum = 0.0;
    for (const auto& node : mu.nodes()) {
      sum += node.weight * std::pow(std::abs(nu.dot(node.direction)), 2.0 * s);
    }
    best = std::min(best, sum);
  }
  return best;
}

void gaussLegendre(int order, std::vector<long double>& nodes,
                   std::vector<long double>& weights) {
  nodes.assign(order, 0.0L);
  weights.assign(order, 0.0L);
  const long double pi = std::numbers::pi_v<long double>;
  for (int i = 0; i < order; ++i) {
    long double x = std::cos(pi * (i + 0.75L) / (order + 0.5L));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L;
      long double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    nodes[i] = x;
    weights[i] = 2.0L / ((1.0L - x * x) * dp * dp);
  }
}

namespace {

// Composite rule on [0, 1] with `panels` equal panels.
long double composite(const std::function<long double(long double)>& g, int panels) {
  static std::vector<long double> x;
  static std::vector<long double> w;
  if (x.empty()) gaussLegendre(20, x, w);
  long double total = 0.0L;
  const long double h = 1.0L / panels;
  for (int p = 0; p < panels; ++p) {
    const long double mid = (p + 0.5L) * h;
    for (std::size_t k = 0; k < x.size(); ++k) total += 0.5L * h * w[k] * g(mid + 0.5L * h * x[k]);
  }
  return total;
}

}  // namespace

long double bruteForceI(const Delta& delta, const SpectralMeasure& mu, double s,
                        double growth, int panels) {
  const long double two_s = 2.0L * s;
  const long double a = 1.0L / (2.0L - two_s);
  const long double b = 1.0L / (two_s - growth);
  long double total = 0.0L;
  for (const auto& node : mu.nodes()) {
    const Vec& theta = node.direction;
    // Below r1 the rounding error of delta is amplified by r^{-1-2s}, so
    // delta = c2 r^2 + c4 r^4 is fitted from r1 and r1 / 2 and integrated.
    const long double r1 = 1e-3L;
    const long double d1 = delta(r1, theta);
    const long double dh = delta(r1 / 2, theta);
    const long double c4 = (d1 - 4.0L * dh) / (r1 * r1 * r1 * r1 * (1.0L - 0.25L));
    const long double c2 = (d1 - c4 * r1 * r1 * r1 * r1) / (r1 * r1);
    const long double near = c2 * std::pow(r1, 2.0L - two_s) / (2.0L - two_s) +
                             c4 * std::pow(r1, 4.0L - two_s) / (4.0L - two_s);
    // r = t^a on [r1, 1]: dr r^{-1-2s} = a t^{-1-2sa} dt.
    const long double t1 = std::pow(r1, 1.0L / a);
    const long double inner = near + (1.0L - t1) * composite(
        [&](long double u) {
          const long double t = t1 + (1.0L - t1) * u;
          const long double r = std::pow(t, a);
          return delta(r, theta) * a * std::pow(t, -1.0L - two_s * a);
        },
        panels);
    // r = w^{-b} on [1, inf): dr r^{-1-2s} = b w^{2sb - 1} dw.
    const long double outer = composite(
        [&](long double w) {
          const long double r = std::pow(w, -b);
          return delta(r, theta) * b * std::pow(w, two_s * b - 1.0L);
        },
        panels);
    total += node.weight * 2.0L * (inner + outer);
  }
  return total;
}

long double integrateToInfinity(const std::function<long double(long double)>& g,
                                long double a, int panels) {
  // r = a / t, dr = a / t^2 dt.
  return composite([&](long double t) { return g(a / t) * a / (t * t); }, panels);
}

long double barrierProfile(long double rho, long double gamma) {
  auto psi = [](long double t) { return t > 0 ? std::exp(-1.0L / t) : 0.0L; };
  const long double A = psi(1.0L - rho);
  const long double B = psi(rho - 0.5L);
  const long double phi = A / (A + B);
  return (1.0L - phi) * std::pow(rho, gamma);
}

}  // namespace oracle
