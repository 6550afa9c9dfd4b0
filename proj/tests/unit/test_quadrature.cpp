#include "doctest.h"

#include <cmath>
#include <numbers>

#include "nonlocal/errors.hpp"
#include "nonlocal/quadrature.hpp"
#include "oracles.hpp"

using namespace nonlocal;

TEST_CASE("adaptive integration of smooth and singular integrands") {
  const auto q = integrate([](double x) { return std::exp(x); }, 0.0, 1.0, {1e-13, 1e-13});
  CHECK(std::abs(q.value - (std::exp(1.0) - 1.0)) <= 1e-12);
  CHECK_FALSE(q.capped);
  const auto sing = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-10, 0});
  CHECK(std::abs(sing.value - 2.0) <= 1e-8);
}

TEST_CASE("near-origin bound") {
  CHECK(nearOriginBound(1.0, FractionalOrder(0.5), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(nearOriginBound(0.0, FractionalOrder(0.3), 0.7) == 0.0);
  const double expected = 2.0 * std::pow(0.5, 1.5) / 1.5;
  CHECK(nearOriginBound(1.0, FractionalOrder(0.25), 0.5) == doctest::Approx(expected).epsilon(1e-14));
  // The bound dominates the integral of r^2 r^{-1-2s} it majorizes.
  const auto q = integrate([](double r) { return 2.0 * r * r * std::pow(r, -1.5); }, 0.0, 0.5,
                           {1e-12, 1e-12});
  CHECK(q.value == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("tail bound") {
  const FractionalOrder s(0.5);
  CHECK(tailBound(0.0, 0.0, 0.0, 0.0, s, 1.0) == 0.0);
  // |u| <= 2K when kappa = 0, so the second difference is at most 4K:
  // 2 int_1^inf 4 r^{-2} dr.
  CHECK(tailBound(1.0, 0.0, 0.0, 0.0, s, 1.0) == doctest::Approx(8.0));
  // 2 int_4^inf 2 (1 + r^{1/2}) r^{-2} dr.
  CHECK(tailBound(1.0, 0.5, 0.0, 0.0, s, 4.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(tailBound(1.0, 1.0, 0.0, 0.0, s, 1.0), DivergentTailError);
  // A bound that decays in R and grows with the data.
  CHECK(tailBound(1.0, 0.5, 0.0, 0.0, s, 8.0) < tailBound(1.0, 0.5, 0.0, 0.0, s, 4.0));
  CHECK(tailBound(1.0, 0.5, 2.0, 1.0, s, 4.0) > tailBound(1.0, 0.5, 0.0, 0.0, s, 4.0));
}

TEST_CASE("radial panel integration") {
  const FractionalOrder s(0.5);
  const auto zero = adaptivePanelIntegrate([](double) { return 0.0; },
                                           RadialQuadPlan::make(s, 0.01, 1.0, {1e-12, 1e-12}));
  CHECK(zero.value == 0.0);
  CHECK(zero.error == 0.0);
  const auto q = adaptivePanelIntegrate([](double r) { return r * r; },
                                        RadialQuadPlan::make(s, 0.01, 1.0, {1e-12, 1e-12}));
  CHECK(std::abs(q.value - 1.98) <= 1e-10);
  CHECK_THROWS_AS(adaptivePanelIntegrate([](double) { return NAN; },
                                         RadialQuadPlan::make(s, 0.1, 1.0, {1e-9, 1e-9})),
                  InputError);
}

TEST_CASE("fractional constant against the closed form") {
  for (double s : {0.05, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.95}) {
    const auto cs = fractionalConstant(FractionalOrder(s));
    const double ref = oracle::fractionalConstant(s);
    CHECK(std::abs(cs.value - ref) <= 1e-10 * ref);
    CHECK(cs.error <= 1e-9 * ref);
  }
  CHECK(std::abs(fractionalConstant(FractionalOrder(0.5)).value - 2.0 * std::numbers::pi) <= 1e-12);
}

TEST_CASE("cosine tail against the full-line closed form") {
  std::vector<long double> x;
  std::vector<long double> w;
  oracle::gaussLegendre(20, x, w);
  for (double s : {0.25, 0.5, 0.75}) {
    const long double two_s = 2.0L * s;
    const long double a = 1.0L / (2.0L - two_s);
    for (double omega : {0.3, 1.0, 7.0}) {
      for (double R : {0.5, 1.0, 3.0}) {
        // int_R^inf = int_0^inf - int_0^R with int_0^inf = -c_s omega^{2s} / 4.
        // On [0, R] substitute r = R t^a so the integrand is smooth in t.
        long double head = 0.0L;
        const int panels = 400;
        for (int p = 0; p < panels; ++p) {
          const long double mid = (p + 0.5L) / panels;
          for (std::size_t k = 0; k < x.size(); ++k) {
            const long double t = mid + 0.5L / panels * x[k];
            const long double r = R * std::pow(t, a);
            const long double half = std::sin(omega * r / 2.0L);
            const long double g = -2.0L * half * half * std::pow(r, -1.0L - two_s);
            head += 0.5L / panels * w[k] * g * R * a * std::pow(t, a - 1.0L);
          }
        }
        const double full = -oracle::fractionalConstant(s) * std::pow(omega, two_s) / 4.0;
        const double expected = full - static_cast<double>(head);
        const auto q = cosineTailIntegral(omega, R, FractionalOrder(s));
        INFO("s = " << s << ", omega = " << omega << ", R = " << R);
        CHECK(std::abs(q.value - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
      }
    }
  }
  CHECK(cosineTailIntegral(0.0, 1.0, FractionalOrder(0.5)).value == 0.0);
}

TEST_CASE("geometric breaks") {
  const auto b = geometricBreaks(1.0, 64.0, 4.0);
  REQUIRE(b.size() == 4);
  CHECK(b.front() == 1.0);
  CHECK(b.back() == 64.0);
}
