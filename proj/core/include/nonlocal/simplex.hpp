#pragma once

#include <functional>

#include "nonlocal/types.hpp"

namespace nonlocal {

struct SimplexResult {
  Vec x;
  double value;
  int iterations;
};

struct SimplexOptions {
  double initialStep = 0.1;
  /// Stop when the simplex diameter falls below this.
  double xTol = 1e-12;
  /// Stop when max - min over the simplex falls below this.
  double fTol = 1e-16;
  int maxIterations = 2000;
};

/// Derivative-free Nelder–Mead minimization started from `start`.
SimplexResult nelderMead(const std::function<double(const Vec&)>& f,
                         const Vec& start, const SimplexOptions& options = {});

}  // namespace nonlocal
