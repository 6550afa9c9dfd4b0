#include "doctest.h"

#include <cmath>
#include <random>

#include "nonlocal/errors.hpp"
#include "nonlocal/field.hpp"

using namespace nonlocal;

namespace {

Vec randomVec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * g(rng);
  return v;
}

}  // namespace

TEST_CASE("affine second differences vanish") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto u = ScalarField::affine(randomVec(rng, 3), 2.0);
    const Vec x = randomVec(rng, 3, 10.0);
    const Vec y = randomVec(rng, 3, 10.0);
    CHECK(std::abs(u.secondDifference(x, y)) <= 1e-12 * (1.0 + std::abs(u(x))));
  }
}

TEST_CASE("quadratic second difference is 2 y.Ay") {
  std::mt19937_64 rng(2);
  Mat B = Mat::Random(3, 3);
  const Mat A = 0.5 * (B + B.transpose());
  const auto u = ScalarField::quadratic(A);
  for (int k = 0; k < 50; ++k) {
    const Vec x = randomVec(rng, 3);
    const Vec y = randomVec(rng, 3);
    CHECK(u.secondDifference(x, y) == doctest::Approx(2.0 * y.dot(A * y)).epsilon(1e-10));
  }
  CHECK(u.growth().kappa == 2.0);
  CHECK_THROWS_AS(ScalarField::quadratic(Mat::Random(2, 3)), DomainError);
}

TEST_CASE("cosine second difference matches the trigonometric identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Vec xi = randomVec(rng, 2, 2.0);
    const double phase = unif(rng);
    const auto u = ScalarField::cosine(xi, 1.0, phase);
    const Vec x = randomVec(rng, 2, 5.0);
    Vec theta = randomVec(rng, 2);
    theta.normalize();
    const double r = std::abs(unif(rng));
    const double expected = 2.0 * std::cos(xi.dot(x) + phase) * (std::cos(xi.dot(theta) * r) - 1.0);
    CHECK(std::abs(u.secondDifference(x, r * theta) - expected) <= 1e-12);
  }
}

TEST_CASE("pure power stable second difference") {
  std::mt19937_64 rng(4);
  for (double gamma : {0.3, 0.5, 1.0, 1.4}) {
    for (int k = 0; k < 50; ++k) {
      const Vec x = randomVec(rng, 3, 3.0);
      const Vec y = randomVec(rng, 3, 1e-3);
      // Long double reference.
      long double a = 0, b = 0, c = 0;
      for (int i = 0; i < 3; ++i) {
        const long double xi = x[i], yi = y[i];
        a += (xi + yi) * (xi + yi);
        b += (xi - yi) * (xi - yi);
        c += xi * xi;
      }
      const long double ref = std::pow(a, gamma / 2.0L) + std::pow(b, gamma / 2.0L) -
                              2.0L * std::pow(c, gamma / 2.0L);
      CHECK(std::abs(powerSecondDifference(x, y, gamma) - static_cast<double>(ref)) <=
            1e-9 * std::abs(static_cast<double>(ref)) + 1e-17);
    }
  }
}

TEST_CASE("combinators") {
  Vec slope(2);
  slope << 1.0, -2.0;
  const auto a = ScalarField::affine(slope, 0.5);
  Vec xi(2);
  xi << 0.3, 0.7;
  const auto c = ScalarField::cosine(xi, 2.0, 0.1);
  Vec x(2);
  x << 0.4, -1.2;
  CHECK((a + c)(x) == doctest::Approx(a(x) + c(x)));
  CHECK((a - c)(x) == doctest::Approx(a(x) - c(x)));
  CHECK((3.0 * c)(x) == doctest::Approx(3.0 * c(x)));
  Vec shift(2);
  shift << 1.0, 2.0;
  CHECK(c.translated(shift)(x) == doctest::Approx(c(Vec(x + shift))));
  Mat Q(2, 2);
  Q << 0.0, -1.0, 1.0, 0.0;
  CHECK(c.rotated(Q)(x) == doctest::Approx(c(Vec(Q * x))));
  CHECK_THROWS_AS(c.rotated(Mat::Constant(2, 2, 1.0)), DomainError);
  CHECK((a + c).growth().kappa == 1.0);
}

TEST_CASE("declared growth is checked") {
  const auto p = ScalarField::purePower(2, 0.5);
  CHECK_NOTHROW(p.withGrowth({1.0, 0.5}));
  CHECK_THROWS_AS(p.withGrowth({1.0, 0.25}), DomainError);
  CHECK_THROWS_AS(p.withGrowth({-1.0, 0.5}), DomainError);
  CHECK(p.withGrowth({2.0, 0.75}).growth().kappa == 0.75);
}

TEST_CASE("constant and cosine growth") {
  CHECK(ScalarField::constant(2, -3.0).growth().K == 3.0);
  CHECK(ScalarField::constant(2, -3.0).growth().kappa == 0.0);
  Vec xi(1);
  xi << 2.0;
  CHECK(ScalarField::cosine(xi, -2.0, 0.0).growth().kappa == 0.0);
}
