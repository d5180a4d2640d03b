#include <cmath>
#include <string>

#include "uqlab/data/datasets.hpp"
#include "uqlab/error.hpp"
#include "uqlab/nn/mlp.hpp"

namespace uqlab::data {

std::string_view to_string(SplitTag t) {
  switch (t) {
    case SplitTag::train: return "train";
    case SplitTag::test: return "test";
    case SplitTag::id: return "id";
    case SplitTag::ood: return "ood";
  }
  return "?";
}

void ToyRegressionConfig::validate() const {
  if (n_points == 0) throw ConfigError("toy regression needs at least one point");
  if (!(low < high)) throw ConfigError("toy regression range must satisfy low < high");
  if (!(amplitude > 0.0)) throw ConfigError("noise amplitude must be positive");
}

double noise_stddev(double x, double amplitude) { return amplitude * nn::sigmoid(x); }

LabeledSet sample_toy(const ToyRegressionConfig& cfg, Rng& rng) {
  cfg.validate();
  LabeledSet set{Matrix(cfg.n_points, 1), Matrix(cfg.n_points, 1), SplitTag::train};
  for (std::size_t i = 0; i < cfg.n_points; ++i) {
    const double x = rng.uniform(cfg.low, cfg.high);
    set.inputs(i, 0) = x;
    set.targets(i, 0) = std::sin(x) + rng.normal(0.0, noise_stddev(x, cfg.amplitude));
  }
  return set;
}

LabeledSet sample_toy(const ToyRegressionConfig& cfg) {
  Rng rng(cfg.seed);
  return sample_toy(cfg, rng);
}

Matrix linspace(double low, double high, std::size_t n) {
  Matrix m(n, 1);
  if (n == 1) {
    m(0, 0) = low;
    return m;
  }
  for (std::size_t i = 0; i < n; ++i) {
    m(i, 0) = low + (high - low) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  m(n - 1, 0) = high;
  return m;
}

RegressionSplit ood_regression_split(Rng& rng, const ToyRegressionConfig& id_cfg, std::size_t ood_points) {
  constexpr double pi = std::numbers::pi;
  if (ood_points < 2) throw ConfigError("OOD grid needs at least one point per branch");
  ToyRegressionConfig cfg = id_cfg;
  cfg.low = -pi;
  cfg.high = pi;
  RegressionSplit split;
  split.id = sample_toy(cfg, rng);
  split.id.tag = SplitTag::id;

  const std::size_t left = ood_points / 2;
  const std::size_t right = ood_points - left;
  split.ood = LabeledSet{Matrix(ood_points, 1), Matrix(ood_points, 1), SplitTag::ood};
  // Ascending x: the left branch runs from -2pi towards -pi, excluding -pi.
  for (std::size_t k = 0; k < left; ++k) {
    const double step = static_cast<double>(left - k) / static_cast<double>(left);
    split.ood.inputs(k, 0) = -pi - pi * step;
  }
  for (std::size_t k = 0; k < right; ++k) {
    const double step = static_cast<double>(k + 1) / static_cast<double>(right);
    split.ood.inputs(left + k, 0) = pi + pi * step;
  }
  for (std::size_t i = 0; i < ood_points; ++i) split.ood.targets(i, 0) = std::sin(split.ood.inputs(i, 0));
  return split;
}

}  // namespace uqlab::data
