#include "nonlocal/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nonlocal/errors.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {
namespace {

enum class Part { Both, Inner, Outer };

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct InnerRadius {
  double r0 = 1.0;
  double nearBound = 0.0;
  double rounding = 0.0;
};

// Largest r0 <= 1 whose near-origin bound meets `target`. Slices with rounding
// error e lose e r^{-2s} below r0, so r0 is not pushed below the point
// where that rounding floor exceeds the near bound.
InnerRadius chooseInnerRadius(const FieldNode& u, const Vec& x, double ux,
                              const RadialSlice& slice, FractionalOrder s, double target) {
  const double two_s = s.order();
  const double p = 2.0 - two_s;
  // Rounding of delta contributes at most scale r0^{-2s} / (2s) below r0.
  const double scale = slice.stable ? slice.roundoff : 8.0 * kEps * std::abs(ux);
  auto rounding = [&](double r0) { return scale * std::pow(r0, -two_s) / two_s; };
  InnerRadius best{1.0, std::numeric_limits<double>::infinity(), 0.0};
  double r0 = 1.0;
  for (int it = 0; it < 200 && r0 > 1e-300; ++it) {
    const double M = u.hessianBound(x, r0);
    if (!std::isfinite(M)) {
      r0 *= 0.5;
      continue;
    }
    const double near = nearOriginBound(M, s, r0);
    const double round = rounding(r0);
    if (near + round < best.nearBound + best.rounding) best = {r0, near, round};
    if (near <= target) return round <= target ? InnerRadius{r0, near, round} : best;
    // Solve 2 M r^p / p = target; M can only shrink with the radius.
    const double solved = std::pow(target * p / (2.0 * M), 1.0 / p);
    if (scale > 0.0 && rounding(solved) > target) {
      // Rounding wins below the minimizer of the summed bound.
      const double balanced = std::sqrt(scale / (2.0 * M));
      if (balanced < r0) {
        const double Mb = u.hessianBound(x, balanced);
        const double nb = nearOriginBound(Mb, s, balanced);
        const double rb = rounding(balanced);
        if (nb + rb < best.nearBound + best.rounding) best = {balanced, nb, rb};
      }
      return best;
    }
    r0 = std::min(0.5 * r0, solved * (1.0 - 1e-12));
  }
  if (!std::isfinite(best.nearBound)) {
    throw DomainError("field is not C^2 in any neighbourhood of the point");
  }
  return best;
}

OperatorEval evaluate(const ScalarField& u, const Vec& x, const SpectralMeasure& mu,
                      FractionalOrder s, Tolerance tol, Part part) {
  if (x.size() != u.dimension() || mu.dimension() != u.dimension()) {
    throw DomainError("field, point and measure must share the dimension");
  }
  if (!(tol.absTol > 0.0)) throw DomainError("absolute tolerance must be positive");
  OperatorEval out;
  const double Lambda = mu.totalMass();
  if (Lambda == 0.0) return out;

  const FieldNode& node = u.node();
  const double ux = u(x);
  if (!std::isfinite(ux)) throw InputError("field value is not finite", 0.0);
  const GrowthBound growth = u.growth();
  const double nearTarget = 0.25 * tol.absTol / Lambda;
  const double tailTarget = 0.25 * tol.absTol / Lambda;
  const Tolerance panelTol{0.25 * tol.absTol / Lambda, tol.relTol};
  const bool inner = part != Part::Outer;
  const bool outer = part != Part::Inner;

  for (const SphereNode& sn : mu.foldedNodes()) {
    const Vec& d = sn.direction;
    const double w = sn.weight;
    RadialSlice slice = node.slice(x, d);
    const std::vector<double> breaks = node.radialBreakpoints(x, d);

    if (inner) {
      const InnerRadius ir =
          chooseInnerRadius(node, x, ux, slice, s, nearTarget);
      out.nearBound += w * ir.nearBound;
      out.panelError += w * ir.rounding;
      if (ir.r0 < 1.0) {
        const auto plan = RadialQuadPlan::make(s, ir.r0, 1.0, panelTol, breaks);
        const QuadResult q = adaptivePanelIntegrate(slice.delta, plan);
        out.i1Part += w * q.value;
        out.panelError += w * q.error;
      }
    }

    if (outer) {
      const double start = std::max(1.0, node.tailStart(x, d));
      std::optional<TailPiece> exact = node.tail(x, d, start, s);
      double R = start;
      if (!exact) {
        if (!(growth.kappa < s.order())) {
          throw DivergentTailError(
              "growth exponent kappa must be below 2s for the tail to converge");
        }
        R = std::max(1.0, 2.0 * x.norm());
        while (tailBound(growth.K, growth.kappa, ux, x.norm(), s, R) > tailTarget) {
          R *= 2.0;
          if (R > 1e300) throw DivergentTailError("tail bound does not decay");
        }
        out.tailBound += w * tailBound(growth.K, growth.kappa, ux, x.norm(), s, R);
      } else {
        out.i2Part += w * 2.0 * exact->value;
        out.panelError += w * 2.0 * exact->error;
      }
      if (R > 1.0) {
        const auto plan = RadialQuadPlan::make(s, 1.0, R, panelTol, breaks);
        const QuadResult q = adaptivePanelIntegrate(slice.delta, plan);
        out.i2Part += w * q.value;
        out.panelError += w * q.error;
      }
    }
  }
  out.value = out.i1Part + out.i2Part;
  return out;
}

}  // namespace

double secondDifference(const ScalarField& u, const Vec& x, const Vec& y) {
  return u.secondDifference(x, y);
}

OperatorEval evalI(const ScalarField& u, const Vec& x, const SpectralMeasure& mu,
                   FractionalOrder s, Tolerance tol) {
  return evaluate(u, x, mu, s, tol, Part::Both);
}

OperatorEval evalI1(const ScalarField& u, const Vec& x, const SpectralMeasure& mu,
                    FractionalOrder s, Tolerance tol) {
  return evaluate(u, x, mu, s, tol, Part::Inner);
}

OperatorEval evalI2(const ScalarField& u, const Vec& x, const SpectralMeasure& mu,
                    FractionalOrder s, Tolerance tol) {
  return evaluate(u, x, mu, s, tol, Part::Outer);
}

Multiplier::Multiplier(const SpectralMeasure& mu, FractionalOrder s)
    : nodes_(mu.foldedNodes().begin(), mu.foldedNodes().end()), s_(s) {
  const FractionalConstant c = fractionalConstant(s);
  cs_ = c.value;
  csError_ = c.error;
}

double Multiplier::operator()(const Vec& xi) const {
  double moment = 0.0;
  for (const SphereNode& n : nodes_) {
    const double dot = std::abs(xi.dot(n.direction));
    if (dot > 0.0) moment += n.weight * std::pow(dot, s_.order());
  }
  return moment == 0.0 ? 0.0 : -cs_ * moment;
}

Multiplier multiplier(const SpectralMeasure& mu, FractionalOrder s) {
  return Multiplier(mu, s);
}

SignReport maxPrincipleCheck(const ScalarField& u, const Vec& xMax,
                             const SpectralMeasure& mu, FractionalOrder s,
                             Tolerance tol) {
  const OperatorEval e = evalI(u, xMax, mu, s, tol);
  return SignReport{e.value, e.budget(), e.value <= e.budget()};
}

}  // namespace nonlocal
