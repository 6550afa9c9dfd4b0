#pragma once

#include <cstdint>
#include <string>

#include "nonlocal/field.hpp"
#include "nonlocal/measure.hpp"

namespace nonlocal {

enum class LemmaId { P1, P2, P3 };

std::string toString(LemmaId id);
/// Parses "P1", "P2" or "P3"; throws DomainError otherwise.
LemmaId parseLemmaId(const std::string& text);

/// Bound on |I_1 v(x)| for x in B_1 when |D^2 v| <= M on B_2:
/// Lambda M int_{-1}^{1} |r|^{1-2s} dr = Lambda M / (1 - s).
double lemmaP1Constant(double M, const SpectralMeasure& mu, FractionalOrder s);

/// Bound on |I_2 v(x)| for x in B_1 when 0 <= v <= |.|^gamma, from
/// |v(x+y) + v(x-y) - 2v(x)| <= (2^{gamma+1} + 2) |y|^gamma for |y| >= 1:
/// (2^{gamma+1} + 2) Lambda 2 / (2s - gamma).
double lemmaP2Constant(double gamma, const SpectralMeasure& mu, FractionalOrder s);

/// Bound on Iv(x) for |x| >= 1 when additionally v = |.|^gamma outside B_1.
/// With omega = x/|x| and g(eta) = |omega + eta|^gamma, the rescaled
/// integrand is split at |rho| = 1/2:
///   Lambda [C_h 2 (1/2)^{2-2s} / (2-2s) + 4 int_{1/2}^inf (1+rho)^gamma rho^{-1-2s} drho]
/// where C_h = 2^{2-gamma} gamma (|gamma - 2| + 1) bounds |D^2 g| on B_{1/2}.
/// The outer integral counts both |omega +- rho theta|^gamma terms.
double lemmaP3Constant(double gamma, const SpectralMeasure& mu, FractionalOrder s);

/// int_{1/2}^inf (1 + rho)^gamma rho^{-1-2s} drho.
double lemmaP3OuterIntegral(double gamma, FractionalOrder s);

struct SampleSpec {
  /// Number of sample points.
  int points = 200;
  /// Largest radius of the P3 sweep (radii log-spaced in [1, maxRadius]).
  double maxRadius = 1e3;
  std::uint64_t seed = 0;
};

struct LemmaReport {
  LemmaId lemmaId = LemmaId::P1;
  double analyticC = 0.0;
  /// sup |I_1 v| (P1), sup |I_2 v| (P2) or sup Iv (P3) over the sample.
  double empiricalSup = 0.0;
  /// Error budget of the evaluation at the worst point.
  double budgetAtWorst = 0.0;
  int samplePoints = 0;
  Vec worstPoint;
  bool pass = false;
};

/// Checks the lemma's hypotheses on a sample (P1: finite-difference C^2
/// stability on B_3; P2: 0 <= v <= |x|^gamma; P3: additionally v = |x|^gamma
/// outside B_1), throwing PreconditionFailure at the first violation, then
/// compares the empirical sup with the analytic constant.
LemmaReport verifyLemma(LemmaId id, const ScalarField& field, double gamma,
                        const SpectralMeasure& mu, FractionalOrder s,
                        const SampleSpec& sample = {}, Tolerance tol = {});

/// Sample points of B_1 (P1, P2) or of radii log-spaced in [1, maxRadius]
/// (P3), with directions from spreadDirections.
std::vector<Vec> lemmaSamplePoints(LemmaId id, int n, const SampleSpec& sample);

}  // namespace nonlocal
