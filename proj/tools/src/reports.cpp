#include "nonlocal_cli/reports.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace nonlocal::cli {
namespace {

Json optionalNumber(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json slackJson(const SlackPair& p) {
  return Json{{"upper", optionalNumber(p.upper)}, {"lower", optionalNumber(p.lower)}};
}

}  // namespace

Json toJson(const Vec& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Json toJson(const OperatorEval& e) {
  return Json{{"value", e.value},         {"i1Part", e.i1Part},
              {"i2Part", e.i2Part},       {"nearBound", e.nearBound},
              {"tailBound", e.tailBound}, {"panelError", e.panelError},
              {"budget", e.budget()}};
}

Json toJson(const NondegeneracyReport& r) {
  return Json{{"lambdaLower", r.lambdaLower},
              {"LambdaUpper", r.LambdaUpper},
              {"argminDirection", toJson(r.argminDirection.vector())},
              {"method", r.method == MinimizationMethod::Exact ? "exact" : "gridAndSimplex"},
              {"degenerate", r.degenerate},
              {"holderLowerBound", r.holderLowerBound},
              {"candidates", r.candidates}};
}

Json toJson(const BarrierCertificate& c) {
  return Json{{"certifiedC", c.certifiedC}, {"cInside", c.cInside},
              {"cOutside", c.cOutside},     {"sampledSup", c.sampledSup},
              {"worstPoint", toJson(c.worstPoint)}, {"samples", c.samples}};
}

Json toJson(const LemmaReport& r) {
  return Json{{"lemmaId", toString(r.lemmaId)},   {"analyticC", r.analyticC},
              {"empiricalSup", r.empiricalSup},   {"budgetAtWorst", r.budgetAtWorst},
              {"samplePoints", r.samplePoints},   {"worstPoint", toJson(r.worstPoint)},
              {"pass", r.pass}};
}

Json toJson(const ReplayReport& r) {
  Json out{{"epsilon", r.epsilon},
           {"x0", toJson(r.x0)},
           {"gammaUsed", r.gammaUsed},
           {"certifiedC", r.certifiedC},
           {"searchRadius", r.searchRadius},
           {"resolution", r.resolution},
           {"y1", r.y1 ? toJson(*r.y1) : Json(nullptr)},
           {"y2", r.y2 ? toJson(*r.y2) : Json(nullptr)},
           {"slack16bis", slackJson(r.slack16bis)},
           {"slackFx", slackJson(r.slackFx)},
           {"slackOrder", slackJson(r.slackOrder)},
           {"slack188", slackJson(r.slack188)},
           {"observedResidual", r.observedResidual},
           {"allowance", r.allowance},
           {"consistent", r.consistent}};
  out["bracket"] = r.bracket ? Json::array({r.bracket->first, r.bracket->second}) : Json(nullptr);
  if (!r.consistent) {
    out["violatedInequality"] = r.violatedInequality;
    out["violationPoint"] = r.violationPoint ? toJson(*r.violationPoint) : Json(nullptr);
    out["violationValue"] = r.violationValue;
  }
  return out;
}

Json toJson(const FlowReport& r) {
  return Json{{"gridSize", r.gridSize},
              {"boxLength", r.boxLength},
              {"timeStep", r.timeStep},
              {"steps", r.steps},
              {"initialOscillation", r.initialOscillation},
              {"finalOscillation", r.finalOscillation},
              {"finalResidual", r.finalResidual},
              {"limitConstant", r.limitConstant},
              {"fAtLimit", r.fAtLimit},
              {"stabilityBound", r.stabilityBound},
              {"monotoneOscillation", r.monotoneOscillation},
              {"oscillationHistory", r.oscillationHistory}};
}

Json toJson(const Classification& c) {
  return Json{{"kind", toString(c.kind)},
              {"constant", c.constant},
              {"slope", toJson(c.slope)},
              {"residual", c.residual},
              {"inconsistentWithKappa", c.inconsistentWithKappa}};
}

std::string formatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csvTable(const std::vector<Vec>& points, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  const auto n = points.empty() ? 0 : points.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out << (i ? "," : "") << 'x' << i;
  for (const auto& c : columns) out << (n || &c != &columns.front() ? "," : "") << c;
  out << '\n';
  for (std::size_t r = 0; r < points.size(); ++r) {
    bool first = true;
    for (double x : points[r]) {
      out << (first ? "" : ",") << formatNumber(x);
      first = false;
    }
    for (double v : rows[r]) {
      out << (first ? "" : ",") << formatNumber(v);
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace nonlocal::cli
