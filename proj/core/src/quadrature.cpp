#include "nonlocal/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <sstream>

#include "nonlocal/errors.hpp"

namespace nonlocal {
namespace {

// Kronrod 15-point abscissae (non-negative half) and weights; the odd
// entries carry the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

double sample(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "integrand is not finite at r = " << x;
    throw InputError(msg.str(), x);
  }
  return y;
}

Panel evalPanel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = sample(f, c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double pair = sample(f, c - dx) + sample(f, c + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return Panel{a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

bool splittable(const Panel& p) {
  const double mid = 0.5 * (p.a + p.b);
  const double scale = std::max(std::abs(p.a), std::abs(p.b));
  return mid > p.a && mid < p.b && (p.b - p.a) > 64.0 * 2.2e-16 * scale;
}

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const {
    return x.error < y.error;
  }
};

std::pair<double, double> totals(const std::vector<Panel>& live,
                                 const std::vector<Panel>& frozen) {
  double value = 0.0;
  double error = 0.0;
  for (const auto& p : live) {
    value += p.value;
    error += p.error;
  }
  for (const auto& p : frozen) {
    value += p.value;
    error += p.error;
  }
  return {value, error};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f,
                     std::span<const double> breaks, Tolerance tol,
                     int maxPanels) {
  std::vector<Panel> live;
  std::vector<Panel> frozen;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) {
      live.push_back(evalPanel(f, breaks[i], breaks[i + 1]));
    }
  }
  if (live.empty()) return {};
  std::make_heap(live.begin(), live.end(), ByError{});

  auto [value, error] = totals(live, frozen);
  QuadResult best{value, error, static_cast<int>(live.size()), false};
  while (error > tol.target(value)) {
    const int count = static_cast<int>(live.size() + frozen.size());
    if (live.empty() || count >= maxPanels) {
      best.capped = true;
      return best;
    }
    std::pop_heap(live.begin(), live.end(), ByError{});
    const Panel worst = live.back();
    live.pop_back();
    if (!splittable(worst)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    for (const Panel& half :
         {evalPanel(f, worst.a, mid), evalPanel(f, mid, worst.b)}) {
      live.push_back(half);
      std::push_heap(live.begin(), live.end(), ByError{});
    }
    std::tie(value, error) = totals(live, frozen);
    if (error <= best.error) {
      best = QuadResult{value, error,
                        static_cast<int>(live.size() + frozen.size()), false};
    }
  }
  return QuadResult{value, error,
                    static_cast<int>(live.size() + frozen.size()), false};
}

QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, Tolerance tol, int maxPanels) {
  const std::array<double, 2> breaks{a, b};
  return integrate(f, breaks, tol, maxPanels);
}

std::vector<double> geometricBreaks(double a, double b, double ratio) {
  std::vector<double> out;
  if (!(b > a)) return out;
  out.push_back(a);
  if (a > 0.0) {
    for (double x = a * ratio; x < b; x *= ratio) out.push_back(x);
  }
  out.push_back(b);
  return out;
}

RadialQuadPlan RadialQuadPlan::make(FractionalOrder s, double r0, double R,
                                    Tolerance tol,
                                    std::span<const double> extraBreaks) {
  if (!(r0 > 0.0 && r0 < R)) {
    throw DomainError("radial plan requires 0 < r0 < R");
  }
  std::vector<double> breaks = geometricBreaks(r0, R, 4.0);
  for (double x : extraBreaks) {
    if (x > r0 && x < R) breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return RadialQuadPlan{s, r0, R, std::move(breaks), tol};
}

double nearOriginBound(double M, FractionalOrder s, double r0) {
  const double p = 2.0 - s.order();
  return 2.0 * M * std::pow(r0, p) / p;
}

double tailBound(double K, double kappa, double uAtX, double normX,
                 FractionalOrder s, double R) {
  const double two_s = s.order();
  if (!(kappa < two_s)) {
    throw DivergentTailError("growth exponent kappa must be below 2s for "
                             "the tail integral to converge");
  }
  if (K == 0.0 && uAtX == 0.0) return 0.0;
  // |d(r)| <= A + B r^kappa on r >= R, using the subadditive majorant
  // (a + r)^kappa <= c (a^kappa + r^kappa) with c = max(1, 2^(kappa-1)).
  double A = 0.0;
  double B = 0.0;
  if (kappa == 0.0) {
    A = 4.0 * K + 2.0 * std::abs(uAtX);
  } else {
    const double c = std::max(1.0, std::pow(2.0, kappa - 1.0));
    A = 2.0 * K * (1.0 + c * std::pow(normX, kappa)) + 2.0 * std::abs(uAtX);
    B = 2.0 * K * c;
  }
  double out = A * std::pow(R, -two_s) / two_s;
  if (B > 0.0) out += B * std::pow(R, kappa - two_s) / (two_s - kappa);
  return 2.0 * out;
}

QuadResult adaptivePanelIntegrate(const std::function<double(double)>& g,
                                  const RadialQuadPlan& plan) {
  const double p = -1.0 - plan.s.order();
  auto weighted = [&](double r) { return g(r) * std::pow(r, p); };
  Tolerance half{0.5 * plan.tolerance.absTol, plan.tolerance.relTol};
  QuadResult out =
      integrate(weighted, plan.breakpoints, half, plan.maxPanels);
  out.value *= 2.0;
  out.error *= 2.0;
  return out;
}

QuadResult cosineTailIntegral(double omega, double R, FractionalOrder s) {
  const double two_s = s.order();
  const double flat = -std::pow(R, -two_s) / two_s;
  omega = std::abs(omega);
  if (omega == 0.0) return QuadResult{0.0, 0.0, 0, false};

  const double a = omega * R;
  if (a < 1.0) {
    // int_a^inf = int_0^inf - int_0^a, the latter by termwise Taylor
    // integration; avoids cancelling two terms of size a^{-2s}.
    const FractionalConstant cs = fractionalConstant(s);
    double head = 0.0;
    double factorial = 1.0;
    double last = 0.0;
    for (int k = 1; k <= 30; ++k) {
      factorial *= (2.0 * k - 1.0) * (2.0 * k);
      const double term = ((k % 2 == 0) ? 1.0 : -1.0) *
                          std::pow(a, 2.0 * k - two_s) /
                          (factorial * (2.0 * k - two_s));
      head += term;
      last = std::abs(term);
      if (last < 1e-20 * std::max(std::abs(head), 1e-300)) break;
    }
    const double scale = std::pow(omega, two_s);
    return QuadResult{scale * (-0.25 * cs.value - head),
                      scale * (0.25 * cs.error + last), 0, false};
  }

  // int_a^inf e^{it} t^{-p} dt = i e^{ia} int_0^inf e^{-y} (a + iy)^{-p} dy
  const double p = 1.0 + two_s;
  auto kernel = [a, p](double y) {
    return std::exp(-y) * std::pow(std::complex<double>(a, y), -p);
  };
  std::vector<double> breaks{0.0};
  for (double y = 0.125; y < 60.0; y *= 2.0) {
    breaks.push_back(y);
  }
  breaks.push_back(60.0);
  const Tolerance tol{1e-17 * std::pow(a, -p), 1e-14};
  const QuadResult re =
      integrate([&](double y) { return kernel(y).real(); }, breaks, tol);
  const QuadResult im =
      integrate([&](double y) { return kernel(y).imag(); }, breaks, tol);
  // Re(i e^{ia} J) = -(sin a Re J + cos a Im J); truncation at y = 60 costs
  // at most e^{-60} a^{-p}.
  const double reE = -(std::sin(a) * re.value + std::cos(a) * im.value);
  const double scale = std::pow(omega, two_s);
  const double error =
      scale * (re.error + im.error + std::exp(-60.0) * std::pow(a, -p));
  return QuadResult{scale * reE + flat, error, re.panels + im.panels,
                    re.capped || im.capped};
}

FractionalConstant fractionalConstant(FractionalOrder s) {
  static std::mutex mutex;
  static std::map<double, FractionalConstant> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(s.value()); it != cache.end()) return it->second;

  // int_0^1 2(1 - cos t) t^{-1-2s} dt by termwise integration of the Taylor
  // series, int_1^inf by the rotated-contour tail.
  const double two_s = s.order();
  double series = 0.0;
  double factorial = 1.0;
  double lastTerm = 0.0;
  for (int k = 1; k <= 30; ++k) {
    factorial *= (2.0 * k - 1.0) * (2.0 * k);
    const double term =
        2.0 * ((k % 2 == 1) ? 1.0 : -1.0) / (factorial * (2.0 * k - two_s));
    series += term;
    lastTerm = std::abs(term);
    if (lastTerm < 1e-20) break;
  }
  const QuadResult tail = cosineTailIntegral(1.0, 1.0, s);
  const FractionalConstant out{2.0 * (series - 2.0 * tail.value),
                               4.0 * tail.error + 2.0 * lastTerm};
  cache.emplace(s.value(), out);
  return out;
}

}  // namespace nonlocal
