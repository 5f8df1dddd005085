#include "hidsym/report.hpp"

#include <algorithm>
#include <cmath>

namespace hidsym {

ResidualReport summarize(std::string identity, const SpacetimeMetric& metric, std::uint64_t seed, double tolerance,
                         std::span<const double> values, Comparison comparison) {
  ResidualReport r;
  r.identity = std::move(identity);
  r.metric = metric.name();
  r.params = metric.params();
  r.points = values.size();
  r.tolerance = tolerance;
  r.comparison = comparison;
  r.seed = seed;
  if (values.empty()) return r;

  bool finite = true;
  double total = 0.0;
  r.min_residual = std::abs(values.front());
  for (double v : values) {
    const double a = std::abs(v);
    finite = finite && std::isfinite(a);
    r.max_residual = std::max(r.max_residual, a);
    r.min_residual = std::min(r.min_residual, a);
    total += a;
  }
  r.mean_residual = total / static_cast<double>(values.size());
  r.pass = finite && (comparison == Comparison::AtMost ? r.max_residual <= tolerance : r.min_residual >= tolerance);
  return r;
}

Json to_json(const ResidualReport& r) {
  Json j;
  j["identity"] = r.identity;
  j["metric"] = r.metric;
  j["params"] = r.params;
  j["points"] = r.points;
  j["max_residual"] = r.max_residual;
  j["mean_residual"] = r.mean_residual;
  j["min_residual"] = r.min_residual;
  j["tolerance"] = r.tolerance;
  j["comparison"] = r.comparison == Comparison::AtMost ? "at_most" : "at_least";
  j["pass"] = r.pass;
  j["seed"] = r.seed;
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

ResidualReport report_from_json(const Json& j) {
  ResidualReport r;
  r.identity = j.at("identity").get<std::string>();
  r.metric = j.at("metric").get<std::string>();
  r.params = j.at("params").get<Params>();
  r.points = j.at("points").get<std::size_t>();
  r.max_residual = j.at("max_residual").get<double>();
  r.mean_residual = j.at("mean_residual").get<double>();
  r.min_residual = j.value("min_residual", 0.0);
  r.tolerance = j.at("tolerance").get<double>();
  r.comparison = j.value("comparison", std::string("at_most")) == "at_least" ? Comparison::AtLeast : Comparison::AtMost;
  r.pass = j.at("pass").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.details = j.value("details", Json::object());
  return r;
}

}  // namespace hidsym
