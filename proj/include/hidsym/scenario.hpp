#pragma once

// Scenario runner: a JSON config selects a metric, scales, an optional EM
// field, a sample box and a task list; each task writes a JSON report (and
// integrate a CSV trajectory) into the output directory.
//
// Exit codes: 0 every report passes, 1 some residual exceeds its tolerance,
// 2 the config is invalid.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hidsym/electromagnetic.hpp"
#include "hidsym/report.hpp"

namespace hidsym {

inline constexpr int kExitPass = 0;
inline constexpr int kExitResidualFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Environment override for the output directory.
inline constexpr const char* kOutputDirEnv = "HIDSYM_OUT_DIR";

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Coordinate box over (x0..x3, v1..v3).
using SampleBox = std::array<Range, kPhaseDim>;

struct SampleSpec {
  std::size_t count = 20;
  std::uint64_t seed = 1;
  std::optional<SampleBox> box;  ///< default_box(metric) when empty
  std::size_t max_attempts_per_point = 1000;
};

/// Box used when the config gives none: t in [-5, 5]; spherical charts
/// r in [4, 12], theta in [0.4, pi - 0.4], phi in [0, 2 pi], v_r in +-0.3 and
/// v_theta, v_phi in +-0.03; cartesian minkowski x in [-5, 5], v in +-0.5.
SampleBox default_box(const SpacetimeMetric& metric);

/// Uniform draws from the box, rejection-sampled for admissibility.
/// Deterministic for a given seed (mt19937_64, 53-bit mantissa mapping).
std::vector<PhasePoint> sample_points(const PhaseStructure& s, const SampleSpec& spec);

struct EMSpec {
  std::string name;
  Params params;
  /// name == "linear": F = C + x^n D[n]
  Mat4 C = Mat4::Zero();
  std::array<Mat4, 4> D{Mat4::Zero(), Mat4::Zero(), Mat4::Zero(), Mat4::Zero()};
};

struct TaskSpec {
  std::string kind;
  std::vector<std::string> args;
  Json options = Json::object();
};

struct ScenarioConfig {
  std::string metric_name;
  Params metric_params;
  ScaleConstants scales;
  std::optional<EMSpec> em;
  SampleSpec sample;
  std::map<std::string, double> tolerances;
  std::vector<TaskSpec> tasks;
  std::optional<std::string> output_dir;
  unsigned threads = 1;

  /// Throws ConfigError (or ParameterError for invalid metric/scales).
  static ScenarioConfig from_json(const Json& j);
  static ScenarioConfig from_file(const std::filesystem::path& path);

  double tolerance(const std::string& key) const;
};

/// Default tolerance for every named identity.
const std::map<std::string, double>& default_tolerances();

struct TaskResult {
  std::string task;
  std::vector<ResidualReport> reports;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  bool pass() const;
  Json to_json() const;
};

struct RunResult {
  std::vector<TaskResult> tasks;
  std::filesystem::path output_dir;
  int exit_code = kExitPass;
  Json to_json() const;
};

/// Execute every task. Reports are written as <nn>-<task>.json plus summary.json.
RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& output_dir);

/// Load, validate and run. Errors are written to `err`; returns the exit code.
int run_config_file(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_override,
                    std::ostream& out, std::ostream& err);

/// kind in {metrics, killing-fields, em-fields, identities}; killing-fields
/// takes an optional metric name (all metrics otherwise). Throws ConfigError
/// for an unknown kind.
std::vector<CatalogEntry> list_catalog(const std::string& kind, const std::optional<std::string>& arg = std::nullopt);

}  // namespace hidsym
