#pragma once

// Residual reports: {identity, metric, params, points, max_residual,
// mean_residual, tolerance, pass, seed} plus optional details.

#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "hidsym/spacetime.hpp"

namespace hidsym {

using Json = nlohmann::json;

/// AtMost: pass iff every residual <= tolerance. AtLeast: pass iff every
/// value >= tolerance (non-degeneracy checks such as tau_hat ^ Omega^3).
enum class Comparison { AtMost, AtLeast };

struct ResidualReport {
  std::string identity;
  std::string metric;
  Params params;
  std::size_t points = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double min_residual = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::AtMost;
  bool pass = false;
  std::uint64_t seed = 0;
  Json details = Json::object();
};

/// Absolute values of `values` are aggregated. An empty or non-finite set fails.
ResidualReport summarize(std::string identity, const SpacetimeMetric& metric, std::uint64_t seed, double tolerance,
                         std::span<const double> values, Comparison comparison = Comparison::AtMost);

Json to_json(const ResidualReport& r);
ResidualReport report_from_json(const Json& j);

}  // namespace hidsym
