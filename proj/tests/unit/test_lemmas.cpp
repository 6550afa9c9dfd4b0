#include "doctest.h"

#include <cmath>
#include <string>

#include "nonlocal/barrier.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/lemmas.hpp"
#include "nonlocal/operator.hpp"
#include "oracles.hpp"

using namespace nonlocal;

namespace {

SpectralMeasure uniformMass(double mass) { return SpectralMeasure::uniform(2, mass, 64); }

// int_{1/2}^inf (1 + rho)^gamma rho^{-1-2s} d rho with rho = (1/2) u^{-1/alpha}.
double outerIntegral(double gamma, double s) {
  const double alpha = 2.0 * s - gamma;
  std::vector<long double> x, w;
  oracle::gaussLegendre(20, x, w);
  long double total = 0.0L;
  const int panels = 4000;
  for (int p = 0; p < panels; ++p) {
    const long double mid = (p + 0.5L) / panels;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const long double u = mid + 0.5L / panels * x[k];
      const long double rho = 0.5L * std::pow(u, -1.0L / alpha);
      // rho^{-1-2s} (1 + rho)^gamma d rho = 2^alpha / alpha ((1 + rho) / rho)^gamma du.
      const long double jac = std::pow(2.0L, static_cast<long double>(alpha)) / alpha;
      total += 0.5L / panels * w[k] * jac * std::pow((1.0L + rho) / rho, gamma);
    }
  }
  return static_cast<double>(total);
}

}  // namespace

TEST_CASE("P1 constant") {
  CHECK(lemmaP1Constant(0.0, uniformMass(1.0), FractionalOrder(0.4)) == 0.0);
  CHECK(lemmaP1Constant(1.0, uniformMass(1.0), FractionalOrder(0.5)) == doctest::Approx(2.0));
  CHECK(lemmaP1Constant(3.0, uniformMass(2.0), FractionalOrder(0.75)) == doctest::Approx(24.0));
}

TEST_CASE("P2 constant") {
  CHECK(lemmaP2Constant(1e-12, uniformMass(1.0), FractionalOrder(0.5)) ==
        doctest::Approx(8.0).epsilon(1e-9));
  const double expected = (std::pow(2.0, 1.5) + 2.0) * 2.0 / 0.5;
  CHECK(lemmaP2Constant(0.5, uniformMass(1.0), FractionalOrder(0.5)) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(lemmaP2Constant(0.5, SpectralMeasure::atomic(2, {}), FractionalOrder(0.5)) == 0.0);
}

TEST_CASE("P3 constant and its outer integral") {
  for (auto [s, gamma] : {std::pair{0.5, 0.5}, {0.75, 1.0}, {0.3, 0.35}, {0.9, 0.1}}) {
    const double outer = outerIntegral(gamma, s);
    CHECK(lemmaP3OuterIntegral(gamma, FractionalOrder(s)) == doctest::Approx(outer).epsilon(1e-9));
    const double Ch = std::pow(2.0, 2.0 - gamma) * gamma * (std::abs(gamma - 2.0) + 1.0);
    const double inner = Ch * 2.0 * std::pow(0.5, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    CHECK(lemmaP3Constant(gamma, uniformMass(1.5), FractionalOrder(s)) ==
          doctest::Approx(1.5 * (inner + 4.0 * outer)).epsilon(1e-9));
  }
  CHECK(lemmaP3Constant(0.5, SpectralMeasure::atomic(2, {}), FractionalOrder(0.5)) == 0.0);
}

TEST_CASE("lemma ids") {
  CHECK((parseLemmaId("P2") == LemmaId::P2));
  CHECK(toString(LemmaId::P3) == "P3");
  CHECK_THROWS_AS(parseLemmaId("P4"), DomainError);
}

TEST_CASE("sample points") {
  SampleSpec spec;
  spec.points = 30;
  spec.maxRadius = 100.0;
  const auto inside = lemmaSamplePoints(LemmaId::P1, 2, spec);
  REQUIRE(inside.size() == 30);
  for (const Vec& x : inside) CHECK(x.norm() < 1.0 + 1e-12);
  const auto outside = lemmaSamplePoints(LemmaId::P3, 2, spec);
  for (const Vec& x : outside) {
    CHECK(x.norm() >= 1.0 - 1e-12);
    CHECK(x.norm() <= 100.0 * (1 + 1e-12));
  }
}

TEST_CASE("P1 holds for the zero field") {
  SampleSpec spec;
  spec.points = 10;
  const auto r = verifyLemma(LemmaId::P1, ScalarField::constant(2, 0.0), 0.5, uniformMass(1.0),
                             FractionalOrder(0.5), spec);
  CHECK(r.empiricalSup == 0.0);
  CHECK(r.pass);
}

TEST_CASE("P1, P2 and P3 hold for the barrier") {
  const FractionalOrder s(0.5);
  const auto mu = uniformMass(1.0);
  const auto b = buildBarrier(0.5, s, 2);
  SampleSpec spec;
  spec.points = 12;
  for (LemmaId id : {LemmaId::P1, LemmaId::P2, LemmaId::P3}) {
    const auto r = verifyLemma(id, b.field(), 0.5, mu, s, spec, {1e-7, 1e-7});
    CHECK(r.pass);
    CHECK(r.empiricalSup <= r.analyticC);
    CHECK(r.samplePoints == 12);
  }
}

TEST_CASE("P3 for the pure power is homogeneous") {
  const FractionalOrder s(0.5);
  const auto mu = uniformMass(1.0);
  const auto u = ScalarField::purePower(2, 0.5);
  SampleSpec spec;
  spec.points = 8;
  CHECK(verifyLemma(LemmaId::P3, u, 0.5, mu, s, spec).pass);
  Vec e(2);
  e << 0.6, 0.8;
  const double base = evalI(u, e, mu, s).value;
  for (double r : {2.0, 10.0, 100.0}) {
    CHECK(evalI(u, Vec(r * e), mu, s).value * std::pow(r, 0.5) ==
          doctest::Approx(base).epsilon(1e-7));
  }
}

TEST_CASE("lemma exponent must lie in (0, 2s)") {
  const auto mu = uniformMass(1.0);
  try {
    verifyLemma(LemmaId::P2, ScalarField::purePower(2, 1.2), 1.2, mu, FractionalOrder(0.5));
    FAIL("expected a DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("γ ∈ (0, 2s)") != std::string::npos);
  }
}
