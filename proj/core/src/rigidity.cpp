#include "nonlocal/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include "nonlocal/errors.hpp"
#include "nonlocal/operator.hpp"
#include "nonlocal/simplex.hpp"

namespace nonlocal {
namespace {

constexpr double kMaxSearchRadius = 1e6;

int defaultPointsPerAxis(int n) {
  switch (n) {
    case 1: return 2001;
    case 2: return 201;
    case 3: return 41;
    default: return 11;
  }
}

struct Candidate {
  double value;
  Vec point;
};

// Keeps the `keep` smallest values; earlier entries win ties.
void offer(std::vector<Candidate>& best, std::size_t keep, double value, const Vec& x) {
  if (best.size() == keep && !(value < best.back().value)) return;
  auto it = std::upper_bound(best.begin(), best.end(), value,
                             [](double v, const Candidate& c) { return v < c.value; });
  best.insert(it, Candidate{value, x});
  if (best.size() > keep) best.pop_back();
}

// Minimizes g over the ball B(x0, radius) by zooming grids.
Candidate zoomSearch(const std::function<double(const Vec&)>& g, const Vec& x0,
                     double radius, const SearchOptions& options, double& resolution) {
  const auto n = x0.size();
  const int P = options.pointsPerAxis > 0 ? options.pointsPerAxis
                                          : defaultPointsPerAxis(static_cast<int>(n));
  if (P < 3) throw DomainError("search grid needs at least 3 points per axis");
  const auto keep = static_cast<std::size_t>(std::max(1, options.keep));

  std::vector<Candidate> best{{g(x0), x0}};
  std::vector<Vec> centers{x0};
  double level = radius;
  std::size_t total = 1;
  for (Eigen::Index a = 0; a < n; ++a) total *= static_cast<std::size_t>(P);
  while (true) {
    const double step = 2.0 * level / (P - 1);
    for (const Vec& c : centers) {
      Vec x(n);
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (Eigen::Index a = n - 1; a >= 0; --a) {
          x[a] = c[a] - level + step * static_cast<double>(rest % static_cast<std::size_t>(P));
          rest /= static_cast<std::size_t>(P);
        }
        offer(best, keep, g(x), x);
      }
    }
    resolution = step;
    if (level < options.fineRadius) break;
    centers.clear();
    centers.push_back(x0);
    for (const Candidate& c : best) {
      if ((c.point - x0).norm() > 0.0) centers.push_back(c.point);
    }
    level *= 0.25;
  }

  SimplexOptions polish;
  polish.initialStep = resolution;
  polish.xTol = 1e-14 * std::max(1.0, best.front().point.norm());
  polish.fTol = 0.0;
  polish.maxIterations = 500;
  const SimplexResult r = nelderMead(g, best.front().point, polish);
  if (r.value < best.front().value) return Candidate{r.value, r.x};
  return best.front();
}

void judge(ReplayReport& report, const std::string& name, double slack,
           const Vec& where) {
  if (report.consistent && slack < -report.allowance) {
    report.consistent = false;
    report.violatedInequality = name;
    report.violationPoint = where;
    report.violationValue = slack;
  }
}

std::vector<ReplayReport> runReplay(const ScalarField& u, const Nonlinearity& f,
                                    const SpectralMeasure& mu, FractionalOrder s,
                                    const Vec& x0, Side side,
                                    const ReplayOptions& options) {
  const int n = u.dimension();
  if (x0.size() != n || mu.dimension() != n) {
    throw DomainError("field, base point and measure must share the dimension");
  }
  if (options.epsilonSchedule.empty()) throw DomainError("epsilon schedule is empty");
  for (std::size_t i = 0; i < options.epsilonSchedule.size(); ++i) {
    const double eps = options.epsilonSchedule[i];
    if (!(eps > 0.0)) throw DomainError("epsilon values must be positive");
    if (i > 0 && !(eps < options.epsilonSchedule[i - 1])) {
      throw DomainError("epsilon schedule must be decreasing");
    }
  }
  if (!(options.residual >= 0.0)) throw DomainError("declared residual must be >= 0");

  const GrowthBound growth = u.growth();
  const double gamma = gammaRule(s, growth.kappa);
  const BarrierField barrier = buildBarrier(gamma, s, n);
  const double C = options.certifiedC ? *options.certifiedC
                                      : certifyBarrierC(barrier, mu, s, options.tolerance);
  const double u0 = u(x0);
  const bool upper = side != Side::Lower;
  const bool lower = side != Side::Upper;

  std::vector<ReplayReport> reports;
  for (double eps : options.epsilonSchedule) {
    ReplayReport rep;
    rep.epsilon = eps;
    rep.x0 = x0;
    rep.gammaUsed = gamma;
    rep.certifiedC = C;
    rep.searchRadius = certifiedSearchRadius(growth, x0.norm(), u0, eps, gamma);

    const auto [w1, w2] = comparisonFields(u, x0, eps, barrier);
    const ExtremumSearch found = locateExtrema(upper ? &w1 : nullptr, lower ? &w2 : nullptr,
                                               x0, rep.searchRadius, options.search);
    rep.resolution = found.resolution;

    double budget = 0.0;
    struct Probe {
      double Iu;
      double Iv;
      double uy;
    };
    auto evaluateAt = [&](const Vec& y) {
      const OperatorEval eu = evalI(u, y, mu, s, options.tolerance);
      const OperatorEval ev = evalI(barrier.field(), Vec(y - x0), mu, s, options.tolerance);
      budget = std::max(budget, eu.budget() + eps * ev.budget());
      const double uy = u(y);
      rep.observedResidual = std::max(rep.observedResidual, std::abs(eu.value - f(uy)));
      return Probe{eu.value, ev.value, uy};
    };

    std::optional<Probe> atY1;
    std::optional<Probe> atY2;
    if (upper) {
      rep.y1 = found.argmax;
      atY1 = evaluateAt(found.argmax);
      rep.slack16bis.upper = -(atY1->Iu - eps * atY1->Iv);
      rep.slackFx.upper = C * eps - f(atY1->uy);
      rep.slackOrder.upper = atY1->uy - u0 + 2.0 * eps;
      rep.slack188.upper = C * eps - f(u0 - 2.0 * eps);
    }
    if (lower) {
      rep.y2 = found.argmin;
      atY2 = evaluateAt(found.argmin);
      rep.slack16bis.lower = atY2->Iu + eps * atY2->Iv;
      rep.slackFx.lower = f(atY2->uy) + C * eps;
      rep.slackOrder.lower = u0 + 2.0 * eps - atY2->uy;
      rep.slack188.lower = f(u0 + 2.0 * eps) + C * eps;
    }
    if (upper && lower) {
      rep.bracket = std::pair{f(u0 - 2.0 * eps) - C * eps, f(u0 + 2.0 * eps) + C * eps};
    }
    rep.allowance = options.tolerance.absTol + options.residual + budget;

    if (upper) {
      judge(rep, "16bis", *rep.slack16bis.upper, *rep.y1);
      judge(rep, "Fx", *rep.slackFx.upper, *rep.y1);
      judge(rep, "order", *rep.slackOrder.upper, *rep.y1);
      judge(rep, "188", *rep.slack188.upper, x0);
    }
    if (lower) {
      judge(rep, "16bis", *rep.slack16bis.lower, *rep.y2);
      judge(rep, "Fx", *rep.slackFx.lower, *rep.y2);
      judge(rep, "order", *rep.slackOrder.lower, *rep.y2);
      judge(rep, "188", *rep.slack188.lower, x0);
    }
    if (rep.consistent &&
        rep.observedResidual > options.residual + budget + options.tolerance.absTol) {
      rep.consistent = false;
      rep.violatedInequality = "equation residual";
      rep.violationPoint = upper ? *rep.y1 : *rep.y2;
      rep.violationValue = rep.observedResidual;
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace

Nonlinearity::Nonlinearity(NonlinearityFamily family, double a, double b,
                           std::vector<std::pair<double, double>> knots)
    : family_(family), a_(a), b_(b), knots_(std::move(knots)) {
  checkMonotone();
}

Nonlinearity Nonlinearity::zero() { return Nonlinearity(NonlinearityFamily::Zero, 0, 0, {}); }

Nonlinearity Nonlinearity::linear(double slope, double offset) {
  if (!(slope >= 0.0) || !std::isfinite(slope) || !std::isfinite(offset)) {
    throw DomainError("linear nonlinearity needs a finite slope >= 0");
  }
  return Nonlinearity(NonlinearityFamily::Linear, slope, offset, {});
}

Nonlinearity Nonlinearity::cubic(double coefficient) {
  if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
    throw DomainError("cubic nonlinearity needs a finite coefficient >= 0");
  }
  return Nonlinearity(NonlinearityFamily::Cubic, coefficient, 0, {});
}

Nonlinearity Nonlinearity::arctan(double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw DomainError("arctan nonlinearity needs a finite scale >= 0");
  }
  return Nonlinearity(NonlinearityFamily::Arctan, scale, 0, {});
}

Nonlinearity Nonlinearity::piecewiseLinear(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw DomainError("piecewise linear nonlinearity needs knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
      throw DomainError("piecewise linear knots must be finite");
    }
    if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
      throw DomainError("piecewise linear knots need strictly increasing x");
    }
    if (i > 0 && knots[i].second < knots[i - 1].second) {
      throw DomainError("piecewise linear knots need nondecreasing y");
    }
  }
  return Nonlinearity(NonlinearityFamily::PiecewiseLinear, 0, 0, std::move(knots));
}

double Nonlinearity::operator()(double r) const {
  switch (family_) {
    case NonlinearityFamily::Zero: return 0.0;
    case NonlinearityFamily::Linear: return a_ * r + b_;
    case NonlinearityFamily::Cubic: return a_ * r * r * r;
    case NonlinearityFamily::Arctan: return std::atan(a_ * r);
    case NonlinearityFamily::PiecewiseLinear: {
      if (r <= knots_.front().first) return knots_.front().second;
      if (r >= knots_.back().first) return knots_.back().second;
      const auto hi = std::upper_bound(knots_.begin(), knots_.end(), r,
                                       [](double v, const auto& k) { return v < k.first; });
      const auto lo = hi - 1;
      const double t = (r - lo->first) / (hi->first - lo->first);
      return lo->second + t * (hi->second - lo->second);
    }
  }
  return 0.0;
}

std::vector<double> Nonlinearity::parameters() const {
  switch (family_) {
    case NonlinearityFamily::Zero: return {};
    case NonlinearityFamily::Linear: return {a_, b_};
    case NonlinearityFamily::Cubic:
    case NonlinearityFamily::Arctan: return {a_};
    case NonlinearityFamily::PiecewiseLinear: {
      std::vector<double> out;
      for (const auto& [x, y] : knots_) {
        out.push_back(x);
        out.push_back(y);
      }
      return out;
    }
  }
  return {};
}

Nonlinearity Nonlinearity::mirrored() const {
  switch (family_) {
    case NonlinearityFamily::Linear: return linear(a_, -b_);
    case NonlinearityFamily::PiecewiseLinear: {
      std::vector<std::pair<double, double>> knots;
      for (auto it = knots_.rbegin(); it != knots_.rend(); ++it) {
        knots.emplace_back(-it->first, -it->second);
      }
      return piecewiseLinear(std::move(knots));
    }
    default: return *this;
  }
}

double Nonlinearity::lipschitz(double lo, double hi) const {
  if (hi < lo) std::swap(lo, hi);
  switch (family_) {
    case NonlinearityFamily::Zero: return 0.0;
    case NonlinearityFamily::Linear: return a_;
    case NonlinearityFamily::Cubic: return 3.0 * a_ * std::max(lo * lo, hi * hi);
    case NonlinearityFamily::Arctan: return a_;
    case NonlinearityFamily::PiecewiseLinear: {
      double out = 0.0;
      for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (knots_[i].first <= lo || knots_[i - 1].first >= hi) {
          if (!(lo == hi && knots_[i - 1].first <= lo && lo <= knots_[i].first)) continue;
        }
        out = std::max(out, (knots_[i].second - knots_[i - 1].second) /
                                (knots_[i].first - knots_[i - 1].first));
      }
      return out;
    }
  }
  return 0.0;
}

bool Nonlinearity::identicallyZero() const {
  switch (family_) {
    case NonlinearityFamily::Zero: return true;
    case NonlinearityFamily::Linear: return a_ == 0.0 && b_ == 0.0;
    case NonlinearityFamily::Cubic:
    case NonlinearityFamily::Arctan: return a_ == 0.0;
    case NonlinearityFamily::PiecewiseLinear:
      return std::all_of(knots_.begin(), knots_.end(),
                         [](const auto& k) { return k.second == 0.0; });
  }
  return false;
}

void Nonlinearity::checkMonotone() const {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    double a = dist(rng);
    double b = dist(rng);
    if (b < a) std::swap(a, b);
    if ((*this)(a) > (*this)(b)) {
      std::ostringstream msg;
      msg << "nonlinearity is not nondecreasing: f(" << a << ") > f(" << b << ")";
      throw DomainError(msg.str());
    }
  }
}

std::string toString(NonlinearityFamily family) {
  switch (family) {
    case NonlinearityFamily::Zero: return "zero";
    case NonlinearityFamily::Linear: return "linear";
    case NonlinearityFamily::Cubic: return "cubic";
    case NonlinearityFamily::Arctan: return "arctan";
    case NonlinearityFamily::PiecewiseLinear: return "piecewiseLinear";
  }
  return "?";
}

double gammaRule(FractionalOrder s, double kappa) {
  if (!(kappa >= 0.0) || !(kappa < s.order())) {
    std::ostringstream msg;
    msg << "growth exponent must satisfy kappa ∈ [0, 2s); got kappa = " << kappa
        << " with 2s = " << s.order();
    throw DomainError(msg.str());
  }
  return 0.5 * (s.order() + kappa);
}

std::pair<ScalarField, ScalarField> comparisonFields(const ScalarField& u, const Vec& x0,
                                                     double epsilon,
                                                     const BarrierField& barrier) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const int n = u.dimension();
  const double u0 = u(x0);
  const ScalarField shifted = barrier.field().translated(-x0);
  // u - u(x0) cancels exactly at x0, so w1(x0) = 2 eps and w2(x0) = -2 eps.
  ScalarField w1 = ScalarField::sum({{1.0, u},
                                     {1.0, ScalarField::constant(n, -u0)},
                                     {1.0, ScalarField::constant(n, 2.0 * epsilon)},
                                     {-epsilon, shifted}});
  ScalarField w2 = ScalarField::sum({{1.0, u},
                                     {1.0, ScalarField::constant(n, -u0)},
                                     {1.0, ScalarField::constant(n, -2.0 * epsilon)},
                                     {epsilon, shifted}});
  return {std::move(w1), std::move(w2)};
}

double certifiedSearchRadius(GrowthBound growth, double normX0, double u0,
                             double epsilon, double gamma) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (!(gamma > growth.kappa)) {
    throw DomainError("barrier exponent must exceed the growth exponent");
  }
  auto h = [&](double rho) {
    return growth.K * (1.0 + std::pow(normX0 + rho, growth.kappa)) + std::abs(u0) -
           epsilon * std::pow(rho, gamma);
  };
  // Last sign change on a log grid of [1, 10^6], then bisection.
  constexpr int kPerDecade = 200;
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  for (int i = 6 * kPerDecade; i >= 0; --i) {
    const double rho = std::pow(10.0, static_cast<double>(i) / kPerDecade);
    if (h(rho) >= 0.0) {
      if (i == 6 * kPerDecade) break;
      lo = rho;
      hi = std::pow(10.0, static_cast<double>(i + 1) / kPerDecade);
      found = true;
      break;
    }
    if (i == 0) return 1.0;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "no certified search radius below " << kMaxSearchRadius
        << " (kappa = " << growth.kappa << " too close to gamma = " << gamma
        << " or epsilon = " << epsilon << " too small)";
    throw DomainError(msg.str());
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) >= 0.0 ? lo : hi) = mid;
  }
  return std::max(1.0, hi);
}

ExtremumSearch locateExtrema(const ScalarField* maximize, const ScalarField* minimize,
                             const Vec& x0, double searchRadius,
                             const SearchOptions& options) {
  if (!(searchRadius > 0.0)) throw DomainError("search radius must be positive");
  ExtremumSearch out;
  out.searchRadius = searchRadius;
  if (maximize) {
    const ScalarField& w = *maximize;
    const Candidate c = zoomSearch([&](const Vec& x) { return -w(x); }, x0, searchRadius,
                                   options, out.resolution);
    out.argmax = c.point;
    out.maxValue = -c.value;
  }
  if (minimize) {
    const ScalarField& w = *minimize;
    const Candidate c = zoomSearch([&](const Vec& x) { return w(x); }, x0, searchRadius,
                                   options, out.resolution);
    out.argmin = c.point;
    out.minValue = c.value;
  }
  return out;
}

std::vector<ReplayReport> replay(const ScalarField& u, const Nonlinearity& f,
                                 const SpectralMeasure& mu, FractionalOrder s,
                                 const Vec& x0, const ReplayOptions& options) {
  return runReplay(u, f, mu, s, x0, Side::Both, options);
}

std::vector<ReplayReport> oneSidedReplay(const ScalarField& u, const Nonlinearity& f,
                                         const SpectralMeasure& mu, FractionalOrder s,
                                         const Vec& x0, Side side,
                                         const ReplayOptions& options) {
  if (side == Side::Both) throw DomainError("one-sided replay needs side upper or lower");
  return runReplay(u, f, mu, s, x0, side, options);
}

FlowReport periodicFlow(const PeriodicGrid& u0, const Nonlinearity& f,
                        const SpectralMeasure& mu, FractionalOrder s,
                        const FlowOptions& options) {
  if (mu.dimension() != u0.dimension()) throw DomainError("grid and measure dimensions differ");
  if (!(options.dt > 0.0)) throw DomainError("time step must be positive");
  if (options.steps < 0) throw DomainError("step count must be >= 0");
  if (options.window < 1) throw DomainError("oscillation window must be >= 1");

  const SpectralOperator op(u0.dimension(), u0.pointsPerAxis(), u0.boxLength(),
                            multiplier(mu, s));
  FlowReport report;
  report.gridSize = u0.pointsPerAxis();
  report.boxLength = u0.boxLength();
  report.timeStep = options.dt;
  report.steps = options.steps;
  report.stabilityBound = 1.0 / (op.maxSymbol() + f.lipschitz(u0.min(), u0.max()));
  if (options.dt > report.stabilityBound) {
    std::ostringstream msg;
    msg << "time step dt = " << options.dt << " exceeds the stability bound "
        << report.stabilityBound;
    throw DomainError(msg.str());
  }

  std::vector<double> u = u0.values();
  auto supAbs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  auto oscillation = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  const double limit = 2.0 * std::max(supAbs(u), 1e-12);
  report.initialOscillation = oscillation(u);
  report.oscillationHistory.push_back(report.initialOscillation);

  for (long step = 1; step <= options.steps; ++step) {
    const std::vector<double> Iu = op.apply(u);
    double sup = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] += options.dt * (Iu[i] - f(u[i]));
      sup = std::max(sup, std::abs(u[i]));
    }
    if (!(sup <= limit)) {
      std::ostringstream msg;
      msg << "flow blew up at step " << step << " (sup |u| = " << sup
          << "); reduce dt below " << options.dt;
      throw StabilityError(msg.str());
    }
    if (step % options.window == 0) {
      const double osc = oscillation(u);
      if (osc > report.oscillationHistory.back() * (1.0 + 1e-12) + 1e-15) {
        report.monotoneOscillation = false;
      }
      report.oscillationHistory.push_back(osc);
    }
  }

  const std::vector<double> Iu = op.apply(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    report.finalResidual = std::max(report.finalResidual, std::abs(Iu[i] - f(u[i])));
  }
  report.finalOscillation = oscillation(u);
  double mean = 0.0;
  for (double x : u) mean += x;
  report.limitConstant = mean / static_cast<double>(u.size());
  report.fAtLimit = f(report.limitConstant);
  report.finalValues = std::move(u);
  return report;
}

Classification classifySamples(const std::vector<Vec>& points,
                               const std::vector<double>& values, double kappa) {
  if (points.empty() || points.size() != values.size()) {
    throw DomainError("classification needs one value per sample point");
  }
  const auto n = points.front().size();
  const auto m = static_cast<Eigen::Index>(points.size());
  Mat A(m, n + 1);
  Vec b(m);
  double mean = 0.0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    A.row(i).head(n) = points[static_cast<std::size_t>(i)].transpose();
    A(i, n) = 1.0;
    b[i] = values[static_cast<std::size_t>(i)];
    mean += b[i];
    scale = std::max(scale, std::abs(b[i]));
  }
  mean /= static_cast<double>(m);

  Classification out;
  out.slope = Vec::Zero(n);
  double deviation = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) deviation = std::max(deviation, std::abs(b[i] - mean));
  const double threshold = std::max(1e-6 * scale, 1e-12);
  if (deviation <= threshold) {
    out.kind = SolutionClass::Constant;
    out.constant = mean;
    out.residual = scale > 0.0 ? deviation / scale : 0.0;
    return out;
  }
  const Vec beta = A.colPivHouseholderQr().solve(b);
  out.residual = (A * beta - b).norm() / b.norm();
  out.slope = beta.head(n);
  out.constant = beta[n];
  if (out.residual <= 1e-6) {
    out.kind = SolutionClass::Affine;
    out.inconsistentWithKappa = kappa < 1.0;
  } else {
    out.kind = SolutionClass::NonAffine;
  }
  return out;
}

Classification classifySolution(const ScalarField& u, double kappa, std::uint64_t seed) {
  const int n = u.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vec> points;
  std::vector<double> values;
  for (int k = 0; k < 200; ++k) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = normal(rng);
    const double radius = 10.0 * std::pow(uniform(rng), 1.0 / n);
    const Vec x = d.norm() > 0.0 ? Vec(d * (radius / d.norm())) : Vec::Zero(n);
    points.push_back(x);
    values.push_back(u(x));
  }
  return classifySamples(points, values, kappa);
}

Classification classifySolution(const PeriodicGrid& u, double kappa) {
  std::vector<Vec> points;
  points.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) points.push_back(u.point(i));
  return classifySamples(points, u.values(), kappa);
}

std::string toString(SolutionClass kind) {
  switch (kind) {
    case SolutionClass::Constant: return "constant";
    case SolutionClass::Affine: return "affine";
    case SolutionClass::NonAffine: return "nonAffine";
  }
  return "?";
}

}  // namespace nonlocal
