#include "nonlocal/simplex.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace nonlocal {

SimplexResult nelderMead(const std::function<double(const Vec&)>& f,
                         const Vec& start, const SimplexOptions& options) {
  const auto n = start.size();
  std::vector<Vec> pts(n + 1, start);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1][i] += options.initialStep;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  int it = 0;
  for (; it < options.maxIterations; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& p : pts) diameter = std::max(diameter, (p - pts[best]).norm());
    if (diameter < options.xTol ||
        vals[worst] - vals[best] < options.fTol) {
      break;
    }

    Vec centroid = Vec::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(n);

    const Vec reflected = centroid + (centroid - pts[worst]);
    const double fr = f(reflected);
    if (fr < vals[best]) {
      const Vec expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Vec contracted = outside ? Vec(centroid + 0.5 * (reflected - centroid))
                                   : Vec(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = f(pts[i]);
    }
  }
  const auto bestIt = std::min_element(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(bestIt - vals.begin());
  return SimplexResult{pts[idx], vals[idx], it};
}

}  // namespace nonlocal
