#include "doctest.h"

#include <cmath>
#include <string>

#include "nonlocal/barrier.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/operator.hpp"
#include "oracles.hpp"

using namespace nonlocal;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("cutoff profile") {
  const CutoffProfile phi;
  CHECK(phi(0.0) == 1.0);
  CHECK(phi(0.5) == 1.0);
  CHECK(phi(1.0) == 0.0);
  CHECK(phi(3.0) == 0.0);
  for (double t = 0.5; t < 1.0; t += 0.01) CHECK(phi(t + 0.01) <= phi(t));
  CHECK(CutoffProfile::psi(-1.0) == 0.0);
}

TEST_CASE("barrier values") {
  const auto b = buildBarrier(1.0, FractionalOrder(0.75), 2);
  CHECK(b(vec2(0, 0)) == 0.0);
  CHECK(b(vec2(2, 0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b(vec2(0.25, 0)) == 0.0);
  CHECK(b(vec2(0, 0.3)) == 0.0);
  for (double rho : {0.6, 0.75, 0.9}) {
    CHECK(b(vec2(rho, 0)) == doctest::Approx(static_cast<double>(oracle::barrierProfile(rho, 1.0))));
    CHECK(b(vec2(rho, 0)) <= rho);
  }
}

TEST_CASE("barrier exponent must lie in (0, 2s)") {
  for (double gamma : {0.0, 1.0, 1.5, -0.1}) {
    try {
      buildBarrier(gamma, FractionalOrder(0.5), 2);
      FAIL("expected a DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("γ ∈ (0, 2s)") != std::string::npos);
    }
  }
}

TEST_CASE("certified constant dominates the sampled sweep") {
  const FractionalOrder s(0.5);
  const auto mu = SpectralMeasure::uniform(2, 1.0, 64);
  const auto b = buildBarrier(0.5, s, 2);
  const auto cert = certifyBarrier(b, mu, s, {1e-7, 1e-7});
  CHECK(cert.samples == 200);
  CHECK(cert.sampledSup <= cert.certifiedC);
  CHECK(cert.certifiedC == std::max(cert.cInside, cert.cOutside));
  // Direct sweep of |x| in [1, 100].
  for (int i = 0; i < 10; ++i) {
    const double r = std::pow(100.0, i / 9.0);
    const Vec x = r * vec2(std::cos(0.3 * i), std::sin(0.3 * i));
    CHECK(evalI(b.field(), x, mu, s, {1e-7, 1e-7}).value <= cert.cOutside);
  }
}

TEST_CASE("certified constant scales with the mass") {
  const FractionalOrder s(0.5);
  const auto b = buildBarrier(0.5, s, 2);
  const auto one = certifyBarrier(b, SpectralMeasure::uniform(2, 1.0, 32), s, {1e-6, 1e-6});
  const auto two = certifyBarrier(b, SpectralMeasure::uniform(2, 2.0, 32), s, {1e-6, 1e-6});
  CHECK(two.certifiedC == doctest::Approx(2.0 * one.certifiedC).epsilon(1e-12));
  CHECK(two.sampledSup == doctest::Approx(2.0 * one.sampledSup).epsilon(1e-6));
}

TEST_CASE("zero measure certifies zero") {
  const FractionalOrder s(0.5);
  const auto b = buildBarrier(0.5, s, 2);
  CHECK(certifyBarrierC(b, SpectralMeasure::atomic(2, {}), s) == 0.0);
}

TEST_CASE("the Hessian bound dominates finite differences") {
  const auto b = buildBarrier(0.5, FractionalOrder(0.5), 2);
  const double h = 1e-4;
  double sup = 0.0;
  for (double rho = 0.5; rho <= 1.5; rho += 0.003) {
    const Vec x = vec2(rho, 0);
    const Vec e = vec2(h, 0);
    sup = std::max(sup, std::abs(b(Vec(x + e)) + b(Vec(x - e)) - 2 * b(x)) / (h * h));
  }
  CHECK(sup <= b.hessianSup());
}
