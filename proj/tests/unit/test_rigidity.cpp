#include "doctest.h"

#include <cmath>
#include <random>

#include "nonlocal/errors.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/operator.hpp"
#include "nonlocal/rigidity.hpp"

using namespace nonlocal;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

SpectralMeasure axes2() {
  return SpectralMeasure::atomic(2, {{Direction::normalized(vec2(1, 0)), 1.0},
                                     {Direction::normalized(vec2(0, 1)), 1.0}});
}

}  // namespace

TEST_CASE("nonlinearity catalog") {
  CHECK_THROWS_AS(Nonlinearity::linear(-1.0, 0.0), DomainError);
  CHECK_THROWS_AS(Nonlinearity::cubic(-0.5), DomainError);
  CHECK_THROWS_AS(Nonlinearity::arctan(-1.0), DomainError);
  CHECK_THROWS_AS(Nonlinearity::piecewiseLinear({{0.0, 1.0}, {1.0, 0.0}}), DomainError);
  CHECK_THROWS_AS(Nonlinearity::piecewiseLinear({{1.0, 0.0}, {0.0, 1.0}}), DomainError);

  CHECK(Nonlinearity::linear(2.0, -1.0)(3.0) == 5.0);
  CHECK(Nonlinearity::cubic(2.0)(-1.5) == doctest::Approx(-6.75));
  CHECK(Nonlinearity::arctan(2.0)(0.5) == doctest::Approx(std::atan(1.0)));
  const auto pwl = Nonlinearity::piecewiseLinear({{-1.0, -2.0}, {1.0, 0.0}, {2.0, 3.0}});
  CHECK(pwl(-5.0) == -2.0);
  CHECK(pwl(0.0) == doctest::Approx(-1.0));
  CHECK(pwl(1.5) == doctest::Approx(1.5));
  CHECK(pwl(9.0) == 3.0);
  CHECK(Nonlinearity::zero().identicallyZero());
  CHECK_FALSE(pwl.identicallyZero());
}

TEST_CASE("mirrored nonlinearity is r -> -f(-r)") {
  const std::vector<Nonlinearity> fs{
      Nonlinearity::zero(), Nonlinearity::linear(1.5, 0.25), Nonlinearity::cubic(0.7),
      Nonlinearity::arctan(3.0),
      Nonlinearity::piecewiseLinear({{-1.0, -2.0}, {0.5, 0.0}, {2.0, 3.0}})};
  for (const auto& f : fs) {
    const Nonlinearity g = f.mirrored();
    CHECK((g.family() == f.family()));
    for (double r = -4.0; r <= 4.0; r += 0.125) CHECK(g(r) == doctest::Approx(-f(-r)));
  }
}

TEST_CASE("nonlinearity Lipschitz constants") {
  CHECK(Nonlinearity::linear(2.5, 1.0).lipschitz(-1, 1) == 2.5);
  CHECK(Nonlinearity::cubic(1.0).lipschitz(-2.0, 1.0) == doctest::Approx(12.0));
  CHECK(Nonlinearity::arctan(3.0).lipschitz(-1, 1) == doctest::Approx(3.0));
  const auto pwl = Nonlinearity::piecewiseLinear({{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}});
  CHECK(pwl.lipschitz(0.1, 0.9) == doctest::Approx(1.0));
  CHECK(pwl.lipschitz(0.5, 1.5) == doctest::Approx(3.0));
}

TEST_CASE("gamma rule") {
  CHECK(gammaRule(FractionalOrder(0.75), 0.5) == doctest::Approx(1.0));
  CHECK(gammaRule(FractionalOrder(0.5), 0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(gammaRule(FractionalOrder(0.5), 1.0), DomainError);
  CHECK_THROWS_AS(gammaRule(FractionalOrder(0.5), -0.1), DomainError);
  for (double s : {0.2, 0.5, 0.9}) {
    double prev = 0.0;
    for (int k = 0; k * 0.05 < 2 * s - 1e-9; ++k) {
      const double kappa = k * 0.05;
      const double g = gammaRule(FractionalOrder(s), kappa);
      CHECK(g > kappa);
      CHECK(g < 2 * s);
      CHECK(g > prev);
      prev = g;
    }
  }
}

TEST_CASE("comparison fields pin the base point") {
  const auto u = ScalarField::cosine(vec2(1.3, -0.4), 0.8, 0.2);
  const auto b = buildBarrier(0.5, FractionalOrder(0.5), 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 20; ++i) {
    const Vec x0 = vec2(d(rng), d(rng));
    for (double eps : {0.1, 0.0125, 1e-5}) {
      const auto [w1, w2] = comparisonFields(u, x0, eps, b);
      CHECK(w1(x0) == 2.0 * eps);
      CHECK(w2(x0) == -2.0 * eps);
    }
  }
}

TEST_CASE("certified search radius") {
  // K (1 + rho^0) - eps rho^gamma vanishes at (2K / eps)^{1/gamma}.
  for (double eps : {0.1, 0.01}) {
    for (double gamma : {0.5, 1.0}) {
      const double R = certifiedSearchRadius({1.0, 0.0}, 0.0, 0.0, eps, gamma);
      CHECK(R == doctest::Approx(std::pow(2.0 / eps, 1.0 / gamma)).epsilon(1e-10));
    }
  }
  CHECK(certifiedSearchRadius({0.0, 0.0}, 0.0, 0.0, 0.1, 0.5) == 1.0);

  const GrowthBound g{2.0, 0.3};
  const double gamma = 0.9;
  const double R = certifiedSearchRadius(g, 1.5, 0.7, 0.05, gamma);
  CHECK(R >= 1.0);
  const auto h = [&](double rho) {
    return g.K * (1.0 + std::pow(1.5 + rho, g.kappa)) + 0.7 - 0.05 * std::pow(rho, gamma);
  };
  CHECK(std::abs(h(R)) <= 1e-9 * R);
  for (double rho = R * 1.001; rho < 1e6; rho *= 1.5) CHECK(h(rho) < 0.0);

  const double r1 = certifiedSearchRadius(g, 0.0, 0.0, 0.1, gamma);
  const double r2 = certifiedSearchRadius(g, 0.0, 0.0, 0.01, gamma);
  const double predicted = std::pow(10.0, 1.0 / (gamma - g.kappa));
  CHECK(r2 / r1 == doctest::Approx(predicted).epsilon(0.2));

  CHECK_THROWS_AS(certifiedSearchRadius({1.0, 0.0}, 0.0, 0.0, 1e-12, 0.5), DomainError);
  CHECK_THROWS_AS(certifiedSearchRadius({1.0, 0.5}, 0.0, 0.0, 0.1, 0.5), DomainError);
  CHECK_THROWS_AS(certifiedSearchRadius({1.0, 0.0}, 0.0, 0.0, 0.0, 0.5), DomainError);
}

TEST_CASE("extremum search finds a known peak") {
  Mat freq(2, 2);
  freq << 1.0, 0.0, 0.0, 1.0;
  const auto u = ScalarField::cosineSum(freq, {1.0, 1.0}, {-0.3, 0.2});
  const auto negated = ScalarField::sum({{-1.0, u}});
  const auto found = locateExtrema(&u, &negated, vec2(0.0, 0.0), 1.0);
  CHECK((found.argmax - vec2(0.3, -0.2)).norm() < 1e-6);
  CHECK((found.argmin - vec2(0.3, -0.2)).norm() < 1e-6);
  CHECK(found.maxValue == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(found.minValue == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(found.resolution < 1e-3);

  const auto upperOnly = locateExtrema(&u, nullptr, vec2(0.0, 0.0), 1.0);
  CHECK(upperOnly.argmax.isApprox(found.argmax));
  CHECK(upperOnly.argmin.size() == 0);
}

TEST_CASE("replay of the zero solution") {
  const auto u = ScalarField::constant(2, 0.0);
  const auto f = Nonlinearity::linear(1.0, 0.0);
  ReplayOptions opt;
  opt.epsilonSchedule = {0.1, 0.05};
  opt.certifiedC = 10.0;
  const Vec x0 = vec2(0.25, -0.5);
  const auto reports = replay(u, f, axes2(), FractionalOrder(0.5), x0, opt);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    CHECK(r.consistent);
    CHECK(r.gammaUsed == doctest::Approx(0.5));
    CHECK(r.searchRadius == 1.0);
    REQUIRE(r.y1);
    REQUIRE(r.y2);
    CHECK(*r.y1 == x0);
    CHECK(*r.y2 == x0);
    CHECK(*r.slackFx.upper == doctest::Approx(10.0 * r.epsilon));
    CHECK(*r.slackFx.lower == doctest::Approx(10.0 * r.epsilon));
    CHECK(*r.slackOrder.upper == doctest::Approx(2.0 * r.epsilon));
    REQUIRE(r.bracket);
    CHECK(r.bracket->first <= f(0.0));
    CHECK(r.bracket->second >= f(0.0));
    CHECK(r.bracket->second - r.bracket->first == doctest::Approx(24.0 * r.epsilon));
  }
}

TEST_CASE("replay flags a field that does not solve the equation") {
  const auto u = ScalarField::cosine(vec2(1.0, 0.0), 0.5, 0.0);
  ReplayOptions opt;
  opt.epsilonSchedule = {0.1};
  opt.certifiedC = 10.0;
  const auto reports =
      replay(u, Nonlinearity::zero(), axes2(), FractionalOrder(0.5), vec2(0.0, 0.0), opt);
  REQUIRE(reports.size() == 1);
  CHECK_FALSE(reports[0].consistent);
  CHECK(reports[0].observedResidual > 0.5);
  CHECK_FALSE(reports[0].violatedInequality.empty());
  CHECK(reports[0].violationPoint);
}

TEST_CASE("one-sided replay") {
  const auto u = ScalarField::constant(2, 1.0);
  const auto f = Nonlinearity::linear(1.0, -1.0);
  ReplayOptions opt;
  opt.epsilonSchedule = {0.1};
  opt.certifiedC = 10.0;
  CHECK_THROWS_AS(oneSidedReplay(u, f, axes2(), FractionalOrder(0.5), vec2(0, 0), Side::Both, opt),
                  DomainError);
  const auto up = oneSidedReplay(u, f, axes2(), FractionalOrder(0.5), vec2(0, 0), Side::Upper, opt);
  REQUIRE(up.size() == 1);
  CHECK(up[0].consistent);
  CHECK(up[0].y1);
  CHECK_FALSE(up[0].y2);
  CHECK_FALSE(up[0].slackFx.lower);
  CHECK_FALSE(up[0].bracket);
}

TEST_CASE("replay input validation") {
  const auto u = ScalarField::constant(2, 0.0);
  const auto f = Nonlinearity::zero();
  ReplayOptions opt;
  opt.certifiedC = 10.0;
  opt.epsilonSchedule = {0.1, 0.2};
  CHECK_THROWS_AS(replay(u, f, axes2(), FractionalOrder(0.5), vec2(0, 0), opt), DomainError);
  opt.epsilonSchedule = {};
  CHECK_THROWS_AS(replay(u, f, axes2(), FractionalOrder(0.5), vec2(0, 0), opt), DomainError);
  opt.epsilonSchedule = {0.1};
  Vec x3(3);
  x3 << 0, 0, 0;
  CHECK_THROWS_AS(replay(u, f, axes2(), FractionalOrder(0.5), x3, opt), DomainError);
}

TEST_CASE("classification") {
  const auto c = classifySolution(ScalarField::constant(2, 5.0), 0.0);
  CHECK((c.kind == SolutionClass::Constant));
  CHECK(c.constant == doctest::Approx(5.0));

  const auto affine = ScalarField::affine(vec2(1.0, 0.0), 2.0);
  const auto a = classifySolution(affine, 1.0);
  CHECK((a.kind == SolutionClass::Affine));
  CHECK(a.constant == doctest::Approx(2.0));
  CHECK(a.slope[0] == doctest::Approx(1.0));
  CHECK(a.slope[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(a.inconsistentWithKappa);
  CHECK(classifySolution(affine, 0.5).inconsistentWithKappa);

  const auto cosine = ScalarField::cosine(vec2(1.0, 0.5), 1.0, 0.0);
  CHECK((classifySolution(cosine, 0.0).kind == SolutionClass::NonAffine));

  for (const Vec& shift : {vec2(3.0, -1.0), vec2(-7.5, 2.25)}) {
    const auto t = classifySolution(affine.translated(shift), 1.0);
    CHECK((t.kind == SolutionClass::Affine));
    CHECK((t.slope - a.slope).norm() < 1e-9);
    CHECK((classifySolution(cosine.translated(shift), 0.0).kind == SolutionClass::NonAffine));
  }
}

TEST_CASE("periodic flow decays a single mode at its symbol rate") {
  const int N = 16;
  const double L = 2.0 * M_PI;
  const auto mu = axes2();
  const FractionalOrder s(0.5);
  const Vec xi = vec2(2.0, 1.0);
  const auto grid = PeriodicGrid::sample(ScalarField::cosine(xi, 1.0, 0.0), 2, N, L);
  FlowOptions opt;
  opt.dt = 0.005;
  opt.steps = 200;
  opt.window = 50;
  const auto r = periodicFlow(grid, Nonlinearity::linear(1.0, 0.0), mu, s, opt);
  const double m = multiplier(mu, s)(xi);
  const double factor = std::pow(std::abs(1.0 + opt.dt * (m - 1.0)), opt.steps);
  double sup = 0.0;
  for (double v : r.finalValues) sup = std::max(sup, std::abs(v));
  CHECK(sup == doctest::Approx(factor).epsilon(1e-10));
  CHECK(r.monotoneOscillation);
  CHECK(r.oscillationHistory.size() == 5);
  CHECK(r.limitConstant == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant grids are fixed points of the flow") {
  const auto grid = PeriodicGrid(2, 8, 4.0, std::vector<double>(64, 0.75));
  FlowOptions opt;
  opt.dt = 0.01;
  opt.steps = 100;
  const auto r =
      periodicFlow(grid, Nonlinearity::linear(1.0, -0.75), axes2(), FractionalOrder(0.4), opt);
  CHECK(r.finalOscillation == 0.0);
  CHECK(r.limitConstant == 0.75);
  CHECK(r.fAtLimit == 0.0);
  CHECK(r.finalResidual <= 1e-14);
}

TEST_CASE("flow rejects unstable time steps") {
  const auto grid = randomSmoothGrid(2, 16, 2.0 * M_PI, 1);
  FlowOptions opt;
  opt.dt = 10.0;
  opt.steps = 1;
  CHECK_THROWS_AS(periodicFlow(grid, Nonlinearity::cubic(1.0), axes2(), FractionalOrder(0.5), opt),
                  DomainError);
}

TEST_CASE("flow with a cubic contracts the oscillation") {
  const auto grid = randomSmoothGrid(2, 32, 8.0 * M_PI, 7);
  FlowOptions opt;
  opt.dt = 0.02;
  opt.steps = 2000;
  const auto r = periodicFlow(grid, Nonlinearity::cubic(1.0), SpectralMeasure::uniform(2, 1.0),
                              FractionalOrder(0.5), opt);
  CHECK(r.monotoneOscillation);
  CHECK(r.finalOscillation < r.initialOscillation);
  CHECK(r.timeStep <= r.stabilityBound);

  const auto classified = classifySolution(grid, 0.0);
  CHECK((classified.kind == SolutionClass::NonAffine));
}
