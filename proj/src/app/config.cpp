#include "uqlab/app/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include "uqlab/error.hpp"
#include "uqlab/text.hpp"

namespace uqlab::app {

namespace {

constexpr std::array<std::pair<UseCase, std::string_view>, 7> kUseCaseNames{{
    {UseCase::regression_baseline, "regression-baseline"},
    {UseCase::regression_ensemble, "regression-ensemble"},
    {UseCase::bnn_sample, "bnn-sample"},
    {UseCase::bnn_scaling, "bnn-scaling"},
    {UseCase::decompose, "decompose"},
    {UseCase::ood_regression, "ood-regression"},
    {UseCase::ood_classify, "ood-classify"},
}};

std::string join_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<std::size_t> parse_sizes(std::string_view text, std::string_view what) {
  std::vector<std::size_t> out;
  for (const std::string& part : split(text, ',')) out.push_back(parse_unsigned(trim(part), what));
  return out;
}

template <class Access>
ConfigKey real_key(std::string section, std::string name, std::string help, Access access) {
  const std::string what = section + "." + name;
  return {std::move(section), std::move(name), std::move(help),
          [access](const ExperimentConfig& c) { return format_double(access(const_cast<ExperimentConfig&>(c))); },
          [access, what](ExperimentConfig& c, std::string_view v) { access(c) = parse_double(v, what); }};
}

template <class Access>
ConfigKey size_key(std::string section, std::string name, std::string help, Access access) {
  const std::string what = section + "." + name;
  return {std::move(section), std::move(name), std::move(help),
          [access](const ExperimentConfig& c) { return std::to_string(access(const_cast<ExperimentConfig&>(c))); },
          [access, what](ExperimentConfig& c, std::string_view v) {
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(parse_unsigned(v, what));
          }};
}

template <class Access>
ConfigKey text_key(std::string section, std::string name, std::string help, Access access) {
  return {std::move(section), std::move(name), std::move(help),
          [access](const ExperimentConfig& c) { return access(const_cast<ExperimentConfig&>(c)); },
          [access](ExperimentConfig& c, std::string_view v) { access(c) = std::string(v); }};
}

template <class Access>
ConfigKey list_key(std::string section, std::string name, std::string help, Access access) {
  const std::string what = section + "." + name;
  return {std::move(section), std::move(name), std::move(help),
          [access](const ExperimentConfig& c) { return join_sizes(access(const_cast<ExperimentConfig&>(c))); },
          [access, what](ExperimentConfig& c, std::string_view v) { access(c) = parse_sizes(v, what); }};
}

template <class Access, class Parse>
ConfigKey enum_key(std::string section, std::string name, std::string help, Access access, Parse parse) {
  return {std::move(section), std::move(name), std::move(help),
          [access](const ExperimentConfig& c) {
            return std::string(to_string(access(const_cast<ExperimentConfig&>(c))));
          },
          [access, parse](ExperimentConfig& c, std::string_view v) { access(c) = parse(v); }};
}

std::vector<ConfigKey> build_keys() {
  using C = ExperimentConfig;
  std::vector<ConfigKey> k;
  k.push_back(enum_key("experiment", "use_case", "use case to run", [](C& c) -> UseCase& { return c.use_case; },
                       parse_use_case));
  k.push_back(size_key("experiment", "seed", "master seed", [](C& c) -> std::uint64_t& { return c.seed; }));
  k.push_back(text_key("experiment", "out_dir", "output directory", [](C& c) -> std::string& { return c.out_dir; }));

  k.push_back(size_key("model", "hidden_layers", "hidden layers",
                       [](C& c) -> std::size_t& { return c.model.hidden_layers; }));
  k.push_back(size_key("model", "hidden_units", "units per hidden layer",
                       [](C& c) -> std::size_t& { return c.model.hidden_units; }));
  k.push_back(enum_key("model", "activation", "identity, tanh, relu or sigmoid",
                       [](C& c) -> nn::Activation& { return c.model.activation; }, nn::parse_activation));

  k.push_back(real_key("train", "learning_rate", "step size", [](C& c) -> double& { return c.train.learning_rate; }));
  k.push_back(size_key("train", "epochs", "passes over the data", [](C& c) -> std::size_t& { return c.train.epochs; }));
  k.push_back(size_key("train", "batch_size", "minibatch rows", [](C& c) -> std::size_t& { return c.train.batch_size; }));
  k.push_back(enum_key("train", "optimizer", "sgd or adam", [](C& c) -> nn::OptimizerKind& { return c.train.optimizer; },
                       nn::parse_optimizer));
  k.push_back(real_key("train", "beta1", "adam first-moment decay", [](C& c) -> double& { return c.train.beta1; }));
  k.push_back(real_key("train", "beta2", "adam second-moment decay", [](C& c) -> double& { return c.train.beta2; }));
  k.push_back(real_key("train", "epsilon", "adam denominator offset", [](C& c) -> double& { return c.train.epsilon; }));

  k.push_back(size_key("data", "n_points", "training samples", [](C& c) -> std::size_t& { return c.data.n_points; }));
  k.push_back(real_key("data", "low", "lower end of the training range", [](C& c) -> double& { return c.data.low; }));
  k.push_back(real_key("data", "high", "upper end of the training range", [](C& c) -> double& { return c.data.high; }));
  k.push_back(real_key("data", "amplitude", "noise scale", [](C& c) -> double& { return c.data.amplitude; }));
  k.push_back(size_key("data", "ood_points", "OOD grid points (both branches)",
                       [](C& c) -> std::size_t& { return c.ood_points; }));

  k.push_back(size_key("ensemble", "members", "ensemble size", [](C& c) -> std::size_t& { return c.ensemble_members; }));

  k.push_back(size_key("eval", "grid_points", "evaluation grid points", [](C& c) -> std::size_t& { return c.eval.points; }));
  k.push_back(real_key("eval", "grid_low", "evaluation grid start", [](C& c) -> double& { return c.eval.low; }));
  k.push_back(real_key("eval", "grid_high", "evaluation grid end", [](C& c) -> double& { return c.eval.high; }));

  k.push_back(size_key("bnn", "small_depth", "hidden layers of the small net",
                       [](C& c) -> std::size_t& { return c.bnn.small.depth; }));
  k.push_back(size_key("bnn", "small_width", "width of the small net",
                       [](C& c) -> std::size_t& { return c.bnn.small.width; }));
  k.push_back(size_key("bnn", "large_depth", "hidden layers of the large net",
                       [](C& c) -> std::size_t& { return c.bnn.large.depth; }));
  k.push_back(size_key("bnn", "large_width", "width of the large net",
                       [](C& c) -> std::size_t& { return c.bnn.large.width; }));
  k.push_back(enum_key("bnn", "activation", "hidden activation",
                       [](C& c) -> nn::Activation& { return c.bnn.small.activation; }, nn::parse_activation));
  k.push_back(real_key("bnn", "stddev", "stddev of every weight", [](C& c) -> double& { return c.bnn.small.stddev; }));
  k.push_back(size_key("bnn", "samples", "weight samples per net", [](C& c) -> std::size_t& { return c.bnn.samples; }));
  k.push_back(size_key("bnn", "points", "input grid points", [](C& c) -> std::size_t& { return c.bnn.points; }));
  k.push_back(real_key("bnn", "low", "input grid start", [](C& c) -> double& { return c.bnn.low; }));
  k.push_back(real_key("bnn", "high", "input grid end", [](C& c) -> double& { return c.bnn.high; }));

  k.push_back(list_key("bench", "depths", "comma-separated depths",
                       [](C& c) -> std::vector<std::size_t>& { return c.bench.depths; }));
  k.push_back(list_key("bench", "widths", "comma-separated widths",
                       [](C& c) -> std::vector<std::size_t>& { return c.bench.widths; }));
  k.push_back(list_key("bench", "sample_counts", "comma-separated sample counts",
                       [](C& c) -> std::vector<std::size_t>& { return c.bench.sample_counts; }));
  k.push_back(size_key("bench", "repeats", "timed repeats per cell", [](C& c) -> std::size_t& { return c.bench.repeats; }));
  k.push_back(real_key("bench", "budget_seconds", "wall-time budget per cell",
                       [](C& c) -> double& { return c.bench.budget_seconds; }));
  k.push_back(size_key("bench", "max_parameters", "largest net that is built",
                       [](C& c) -> std::size_t& { return c.bench.max_parameters; }));
  k.push_back(size_key("bench", "batch_rows", "input rows per prediction",
                       [](C& c) -> std::size_t& { return c.bench.batch_rows; }));
  k.push_back(real_key("bench", "stddev", "weight stddev", [](C& c) -> double& { return c.bench.weight_stddev; }));

  k.push_back(enum_key("classify", "source", "clusters or idx",
                       [](C& c) -> ClassifySource& { return c.classify.source; }, parse_classify_source));
  k.push_back(real_key("classify", "shift", "OOD shift in blob stddevs", [](C& c) -> double& { return c.classify.shift; }));
  k.push_back(real_key("classify", "stddev", "blob stddev", [](C& c) -> double& { return c.classify.stddev; }));
  k.push_back(real_key("classify", "spacing", "distance between blob centres in stddevs",
                       [](C& c) -> double& { return c.classify.spacing; }));
  k.push_back(size_key("classify", "train_per_class", "training samples per class",
                       [](C& c) -> std::size_t& { return c.classify.train_per_class; }));
  k.push_back(size_key("classify", "test_per_class", "test and OOD samples per class",
                       [](C& c) -> std::size_t& { return c.classify.test_per_class; }));
  k.push_back(text_key("classify", "idx_train_images", "IDX training images",
                       [](C& c) -> std::string& { return c.classify.idx_train_images; }));
  k.push_back(text_key("classify", "idx_train_labels", "IDX training labels",
                       [](C& c) -> std::string& { return c.classify.idx_train_labels; }));
  k.push_back(text_key("classify", "idx_test_images", "IDX ID test images",
                       [](C& c) -> std::string& { return c.classify.idx_test_images; }));
  k.push_back(text_key("classify", "idx_test_labels", "IDX ID test labels",
                       [](C& c) -> std::string& { return c.classify.idx_test_labels; }));
  k.push_back(text_key("classify", "idx_ood_images", "IDX OOD images",
                       [](C& c) -> std::string& { return c.classify.idx_ood_images; }));
  k.push_back(real_key("classify", "dropout", "dropout rate (training and MC)",
                       [](C& c) -> double& { return c.classify.dropout; }));
  k.push_back(size_key("classify", "mc_samples", "MC dropout passes",
                       [](C& c) -> std::size_t& { return c.classify.mc_samples; }));
  k.push_back(size_key("classify", "epochs", "training epochs", [](C& c) -> std::size_t& { return c.classify.epochs; }));
  k.push_back(real_key("classify", "learning_rate", "step size",
                       [](C& c) -> double& { return c.classify.learning_rate; }));
  k.push_back(size_key("classify", "batch_size", "minibatch rows",
                       [](C& c) -> std::size_t& { return c.classify.batch_size; }));
  k.push_back(enum_key("classify", "entropy", "mean or member-average",
                       [](C& c) -> EntropyMode& { return c.classify.entropy; }, parse_entropy_mode));
  k.push_back(size_key("classify", "histogram_bins", "entropy histogram bins",
                       [](C& c) -> std::size_t& { return c.classify.histogram_bins; }));
  k.push_back(size_key("classify", "reliability_bins", "calibration bins",
                       [](C& c) -> std::size_t& { return c.classify.reliability_bins; }));
  return k;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_spec(const uq::StochasticSpec& s, const std::string& name) {
  check(s.depth >= 1 && s.width >= 1, name + ": depth and width must be positive");
  check(s.stddev >= 0.0, name + ": stddev must be non-negative");
}

}  // namespace

std::string_view to_string(UseCase u) {
  for (const auto& [value, name] : kUseCaseNames)
    if (value == u) return name;
  return "?";
}

UseCase parse_use_case(std::string_view name) {
  for (const auto& [value, text] : kUseCaseNames)
    if (text == name) return value;
  throw ConfigError("unknown use case '" + std::string(name) + "'");
}

const std::vector<UseCase>& all_use_cases() {
  static const std::vector<UseCase> all = [] {
    std::vector<UseCase> out;
    for (const auto& entry : kUseCaseNames) out.push_back(entry.first);
    return out;
  }();
  return all;
}

std::string_view to_string(EntropyMode m) { return m == EntropyMode::mean ? "mean" : "member-average"; }

EntropyMode parse_entropy_mode(std::string_view name) {
  if (name == "mean") return EntropyMode::mean;
  if (name == "member-average") return EntropyMode::member_average;
  throw ConfigError("unknown entropy mode '" + std::string(name) + "' (mean or member-average)");
}

std::string_view to_string(ClassifySource s) { return s == ClassifySource::clusters ? "clusters" : "idx"; }

ClassifySource parse_classify_source(std::string_view name) {
  if (name == "clusters") return ClassifySource::clusters;
  if (name == "idx") return ClassifySource::idx;
  throw ConfigError("unknown classify source '" + std::string(name) + "' (clusters or idx)");
}

void ExperimentConfig::validate() const {
  check(!out_dir.empty(), "experiment.out_dir must not be empty");
  check(model.hidden_layers >= 1 && model.hidden_units >= 1, "model: hidden_layers and hidden_units must be positive");
  data.validate();
  train.validate(data.n_points);
  check(ood_points >= 2, "data.ood_points must be at least 2");
  check(ensemble_members >= 2, "ensemble.members must be at least 2");
  check(eval.points >= 2 && eval.low < eval.high, "eval: need at least 2 points on a non-empty range");
  validate_spec(bnn.small, "bnn small net");
  validate_spec(bnn.large, "bnn large net");
  check(bnn.samples >= 1 && bnn.points >= 1, "bnn: samples and points must be positive");
  check(bnn.low <= bnn.high, "bnn: low must not exceed high");
  bench.validate();
  const ClassifyConfig& k = classify;
  check(k.dropout >= 0.0 && k.dropout < 1.0, "classify.dropout must lie in [0, 1)");
  check(k.mc_samples >= 1 && k.epochs >= 1 && k.batch_size >= 1, "classify: mc_samples, epochs and batch_size must be positive");
  check(k.learning_rate > 0.0, "classify.learning_rate must be positive");
  check(k.histogram_bins >= 1 && k.reliability_bins >= 1, "classify: bin counts must be positive");
  if (k.source == ClassifySource::clusters) {
    check(k.stddev > 0.0 && k.spacing > 0.0, "classify: stddev and spacing must be positive");
    check(k.shift != 0.0, "classify.shift is zero: the OOD set would coincide with the ID data");
    check(k.train_per_class >= 1 && k.test_per_class >= 1, "classify: samples per class must be positive");
  } else {
    check(!k.idx_train_images.empty() && !k.idx_train_labels.empty() && !k.idx_test_images.empty() &&
              !k.idx_test_labels.empty() && !k.idx_ood_images.empty(),
          "classify source idx needs idx_train_*, idx_test_* and idx_ood_images paths");
  }
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view qualified_key, std::string_view value) {
  for (const ConfigKey& key : config_keys()) {
    if (key.qualified() == qualified_key) {
      key.set(cfg, trim(value));
      // The large bnn net shares activation and stddev with the small one.
      cfg.bnn.large.activation = cfg.bnn.small.activation;
      cfg.bnn.large.stddev = cfg.bnn.small.stddev;
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(qualified_key) + "'");
}

std::string echo_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const ConfigKey& key : config_keys()) {
    if (key.section != section) {
      if (!section.empty()) out += '\n';
      section = key.section;
      out += "[" + section + "]\n";
    }
    out += key.name + " = " + key.get(cfg) + "\n";
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg) {
  std::string section;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const std::string where = "config line " + std::to_string(line_no);
    if (line.front() == '[') {
      check(line.back() == ']', where + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    check(eq != std::string_view::npos, where + ": expected 'key = value'");
    check(!section.empty(), where + ": key outside of a [section]");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    try {
      set_config_value(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

}  // namespace uqlab::app
