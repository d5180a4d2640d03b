#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uqlab/app/config.hpp"

namespace uqlab::app {

/// One output file, by name relative to the output directory.
struct Artifact {
  std::string name;
  std::string contents;
};

/// Ordered `key = value` metrics of one run.
using Summary = std::vector<std::pair<std::string, std::string>>;

struct RunResult {
  /// The effective config (after environment overrides).
  ExperimentConfig config;
  /// Main CSV first, then auxiliary CSVs, then the .summary and .config files.
  std::vector<Artifact> artifacts;
  Summary summary;

  const Artifact& artifact(std::string_view name) const;
  /// Looks up a summary value; throws DataError if absent.
  const std::string& metric(std::string_view key) const;
  double metric_value(std::string_view key) const;
};

inline constexpr std::string_view kBaselineHeader = "x;pred_mu;true_mu";
inline constexpr std::string_view kRegressionHeader = "x;pred_mu;true_mu;pred_sigma;pred_sigma_ale;pred_sigma_epi";

/// "<use-case>-<seed>"; every artifact name starts with it.
std::string output_stem(const ExperimentConfig& cfg);

/// Runs the configured use case in memory. `log` receives progress lines.
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Writes every artifact atomically into cfg.out_dir (created if missing).
std::vector<std::filesystem::path> write_artifacts(const RunResult& result);

std::string format_summary(const Summary& summary);
Summary parse_summary(std::string_view text);

}  // namespace uqlab::app
