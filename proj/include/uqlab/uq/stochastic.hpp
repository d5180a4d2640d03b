#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

#include "uqlab/nn/matrix.hpp"
#include "uqlab/nn/mlp.hpp"
#include "uqlab/nn/rng.hpp"

namespace uqlab::uq {

using nn::Matrix;
using nn::Rng;

/// Dense layer whose weights and biases are independent Gaussians. A zero
/// stddev marks a point-mass (deterministic) parameter.
struct GaussianWeightLayer {
  Matrix mean;    // out x in
  Matrix stddev;  // out x in
  std::vector<double> bias_mean;
  std::vector<double> bias_stddev;
  nn::Activation activation = nn::Activation::identity;

  std::size_t in_size() const noexcept { return mean.cols(); }
  std::size_t out_size() const noexcept { return mean.rows(); }
};

/// Network of Gaussian weight layers; the last layer is the output layer.
class StochasticNet {
 public:
  StochasticNet() = default;
  explicit StochasticNet(std::vector<GaussianWeightLayer> layers);

  const std::vector<GaussianWeightLayer>& layers() const noexcept { return layers_; }
  std::size_t input_size() const { return layers_.front().in_size(); }
  std::size_t output_size() const { return layers_.back().out_size(); }
  /// Weights plus biases; equals the parameter count of any sampled Mlp.
  std::size_t parameter_count() const;
  /// Parameters with a strictly positive stddev.
  std::size_t stochastic_parameter_count() const;

 private:
  std::vector<GaussianWeightLayer> layers_;
};

/// Shape of a randomly initialized stochastic net. `depth` counts hidden
/// layers: depth 2, width 16, 1 input, 1 output is 1 -> 16 -> 16 -> 1.
struct StochasticSpec {
  std::size_t inputs = 1;
  std::size_t depth = 2;
  std::size_t width = 16;
  std::size_t outputs = 1;
  nn::Activation activation = nn::Activation::tanh;
  /// Stddev of every weight and bias distribution.
  double stddev = 0.1;
};

/// in*w + w + (depth-1)(w*w + w) + w*out + out.
std::size_t dense_parameter_count(const StochasticSpec& spec);

/// Means Glorot-uniform, biases centred at 0, all stddevs = spec.stddev.
StochasticNet make_stochastic_net(const StochasticSpec& spec, Rng& rng);

/// Lifts a deterministic network to a stochastic one with a common stddev.
StochasticNet from_mlp(const nn::Mlp& net, double stddev);

/// The deterministic network at the distribution means.
nn::Mlp mean_network(const StochasticNet& net);

/// Draws every parameter independently; the result is an ordinary Mlp.
/// Draw order: per layer, weights row-major, then biases.
nn::Mlp sample_weights(const StochasticNet& net, Rng& rng);

/// Sample set of a Monte-Carlo predictor plus its empirical summary.
struct MonteCarloPrediction {
  /// One row per completed sample holding the rows x outputs prediction
  /// flattened row-major.
  Matrix samples;
  Matrix mean;      // rows x outputs
  Matrix variance;  // rows x outputs, unbiased (0 for a single sample)
  std::size_t input_rows = 0;
  std::size_t outputs = 0;
  /// Set when a deadline cut the run short; samples holds what completed.
  bool truncated = false;

  /// Prediction of sample s as a rows x outputs matrix.
  Matrix sample(std::size_t s) const;
};

inline constexpr std::size_t kDefaultMonteCarloSamples = 50;

using Deadline = std::chrono::steady_clock::time_point;

/// n_samples forward passes, each through freshly sampled weights. Weights are
/// sampled one row at a time while propagating, so memory stays at the size of
/// the distribution parameters; the draw order matches sample_weights.
MonteCarloPrediction stochastic_predict(const StochasticNet& net, const Matrix& inputs, std::size_t n_samples,
                                        Rng& rng, std::optional<Deadline> deadline = std::nullopt);

/// Empirical mean / unbiased variance of a sample matrix.
void summarize(MonteCarloPrediction& prediction);

}  // namespace uqlab::uq
