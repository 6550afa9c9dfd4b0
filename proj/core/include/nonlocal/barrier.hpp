#pragma once

#include <optional>

#include "nonlocal/field.hpp"
#include "nonlocal/measure.hpp"

namespace nonlocal {

/// phi(t) = psi(1 - t) / (psi(1 - t) + psi(t - 1/2)) with psi(t) = exp(-1/t)
/// for t > 0 and 0 otherwise: phi = 1 on t <= 1/2, phi = 0 on t >= 1.
struct CutoffProfile {
  static double psi(double t);
  double operator()(double t) const;
};

enum class CertificationMode { Analytic, Sampled };

/// v(x) = (1 - phi(|x|)) |x|^gamma.
class BarrierField {
 public:
  double gamma() const noexcept { return gamma_; }
  FractionalOrder order() const noexcept { return s_; }
  int dimension() const noexcept { return field_.dimension(); }
  const CutoffProfile& cutoff() const noexcept { return cutoff_; }
  const ScalarField& field() const noexcept { return field_; }
  double operator()(const Vec& x) const { return field_(x); }

  /// Bound on |D^2 v| over R^n, from a dense radial sample of the profile
  /// with safety factor 1.5.
  double hessianSup() const noexcept { return hessianSup_; }
  CertificationMode certificationMode() const noexcept { return CertificationMode::Sampled; }

  /// Set once certifyBarrierC has run.
  std::optional<double> certifiedC() const noexcept { return certifiedC_; }
  BarrierField withCertifiedC(double C) const;

 private:
  friend BarrierField buildBarrier(double gamma, FractionalOrder s, int n);
  BarrierField(double gamma, FractionalOrder s, ScalarField field, double hessianSup);

  double gamma_;
  FractionalOrder s_;
  CutoffProfile cutoff_;
  ScalarField field_;
  double hessianSup_;
  std::optional<double> certifiedC_;
};

/// Builds v and verifies v(0) = 0, 0 <= v <= |x|^gamma and v = |x|^gamma
/// for |x| >= 1 on a deterministic sample (10^3 radii in [0, 2] times 64
/// directions, plus |x| in {1, 1 + 1e-9, 10, 100}). Throws DomainError
/// unless gamma lies in (0, 2s).
BarrierField buildBarrier(double gamma, FractionalOrder s, int n);

struct BarrierCertificate {
  double certifiedC = 0.0;
  /// P1 + P2 constants: bound on Iv over B_1.
  double cInside = 0.0;
  /// P3 constant: bound on Iv outside B_1.
  double cOutside = 0.0;
  double sampledSup = 0.0;
  Vec worstPoint;
  int samples = 0;
};

/// certifiedC = max(cInside, cOutside), cross-checked by evalI at x = 0
/// and 199 points with radii log-spaced in [1e-3, 1e3]. Throws
/// CertificationFailure when a sampled value exceeds the constant by more
/// than its error budget.
BarrierCertificate certifyBarrier(const BarrierField& b, const SpectralMeasure& mu,
                                  FractionalOrder s, Tolerance tol = {});
double certifyBarrierC(const BarrierField& b, const SpectralMeasure& mu,
                       FractionalOrder s, Tolerance tol = {});

}  // namespace nonlocal
