// hidsym run <config.json> [--out DIR]
// hidsym list <metrics|killing-fields [metric]|em-fields|identities>

#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hidsym/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Phase-space contact geometry checks and orbit integration"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run the tasks of a JSON scenario config");
  run->add_option("config", config_path, "scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (overrides HIDSYM_OUT_DIR and the config)");

  std::string kind;
  std::string metric;
  auto* list = app.add_subcommand("list", "list a catalog");
  list->add_option("kind", kind, "metrics, killing-fields, em-fields or identities")->required();
  list->add_option("metric", metric, "metric for killing-fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hidsym::kExitConfigError;
  }

  if (*run) {
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    return hidsym::run_config_file(config_path, out, std::cout, std::cerr);
  }

  try {
    const auto entries = hidsym::list_catalog(kind, metric.empty() ? std::nullopt : std::optional<std::string>(metric));
    std::size_t width = 0;
    for (const auto& e : entries) width = std::max(width, e.name.size());
    for (const auto& e : entries) std::cout << std::left << std::setw(static_cast<int>(width) + 2) << e.name << e.description << '\n';
  } catch (const hidsym::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return hidsym::kExitConfigError;
  }
  return 0;
}
