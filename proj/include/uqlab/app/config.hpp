#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "uqlab/bench/scaling.hpp"
#include "uqlab/data/datasets.hpp"
#include "uqlab/nn/mlp.hpp"
#include "uqlab/nn/train.hpp"
#include "uqlab/uq/stochastic.hpp"

namespace uqlab::app {

enum class UseCase {
  regression_baseline,
  regression_ensemble,
  bnn_sample,
  bnn_scaling,
  decompose,
  ood_regression,
  ood_classify,
};

std::string_view to_string(UseCase u);
UseCase parse_use_case(std::string_view name);
const std::vector<UseCase>& all_use_cases();

enum class EntropyMode { mean, member_average };
std::string_view to_string(EntropyMode m);
EntropyMode parse_entropy_mode(std::string_view name);

enum class ClassifySource { clusters, idx };
std::string_view to_string(ClassifySource s);
ClassifySource parse_classify_source(std::string_view name);

struct EvalGrid {
  std::size_t points = 400;
  double low = -2.0 * std::numbers::pi;
  double high = 2.0 * std::numbers::pi;
};

struct BnnConfig {
  uq::StochasticSpec small{};
  uq::StochasticSpec large{.depth = 4, .width = 64};
  std::size_t samples = uq::kDefaultMonteCarloSamples;
  std::size_t points = 50;
  double low = -std::numbers::pi;
  double high = std::numbers::pi;
};

struct ClassifyConfig {
  ClassifySource source = ClassifySource::clusters;
  double shift = 6.0;
  double stddev = 1.0;
  double spacing = 12.0;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 200;
  std::string idx_train_images, idx_train_labels;
  std::string idx_test_images, idx_test_labels;
  std::string idx_ood_images;
  double dropout = 0.2;
  std::size_t mc_samples = uq::kDefaultMonteCarloSamples;
  std::size_t epochs = 100;
  double learning_rate = 1e-2;
  std::size_t batch_size = 32;
  EntropyMode entropy = EntropyMode::mean;
  std::size_t histogram_bins = 20;
  std::size_t reliability_bins = 15;
};

/// Everything a run depends on. Its echo (see echo_config) re-creates it exactly.
struct ExperimentConfig {
  UseCase use_case = UseCase::regression_ensemble;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  nn::Architecture model{};
  nn::TrainConfig train{};
  data::ToyRegressionConfig data{};
  std::size_t ood_points = 200;
  std::size_t ensemble_members = 5;
  EvalGrid eval{};
  BnnConfig bnn{};
  bench::ScalingConfig bench{};
  ClassifyConfig classify{};

  /// Throws ConfigError for the first invalid setting.
  void validate() const;
};

/// One settable key, addressed as "section.name" on the command line and as
/// `name = value` under `[section]` in a config file.
struct ConfigKey {
  std::string section;
  std::string name;
  std::string help;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;

  std::string qualified() const { return section + "." + name; }
};

const std::vector<ConfigKey>& config_keys();

/// Sets one key from its text form. Unknown keys and malformed values throw
/// ConfigError.
void set_config_value(ExperimentConfig& cfg, std::string_view qualified_key, std::string_view value);

/// Full config in file form: every key, grouped by section, in a fixed order.
std::string echo_config(const ExperimentConfig& cfg);

/// Applies a config file on top of `base`. Blank lines and lines starting
/// with '#' or ';' are ignored.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

}  // namespace uqlab::app
