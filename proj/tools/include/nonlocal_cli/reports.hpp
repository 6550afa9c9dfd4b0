#pragma once

#include <string>
#include <vector>

#include "nonlocal/barrier.hpp"
#include "nonlocal/lemmas.hpp"
#include "nonlocal/measure.hpp"
#include "nonlocal/operator.hpp"
#include "nonlocal/rigidity.hpp"
#include "nonlocal_cli/config.hpp"

namespace nonlocal::cli {

inline constexpr int kSchemaVersion = 1;

Json toJson(const Vec& v);
Json toJson(const OperatorEval& e);
Json toJson(const NondegeneracyReport& r);
Json toJson(const BarrierCertificate& c);
Json toJson(const LemmaReport& r);
Json toJson(const ReplayReport& r);
/// Everything but the final grid values, which go to CSV.
Json toJson(const FlowReport& r);
Json toJson(const Classification& c);

/// Shortest decimal text that round-trips the double.
std::string formatNumber(double v);

/// One CSV row per point: x0..x{n-1} followed by the named columns.
std::string csvTable(const std::vector<Vec>& points, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

}  // namespace nonlocal::cli
