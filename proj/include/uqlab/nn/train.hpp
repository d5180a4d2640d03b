#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "uqlab/nn/loss.hpp"
#include "uqlab/nn/matrix.hpp"
#include "uqlab/nn/mlp.hpp"

namespace uqlab::nn {

enum class OptimizerKind { sgd, adam };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 400;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Hidden-activation dropout applied during training (0 disables).
  double dropout = 0.0;

  /// Throws ConfigError describing the first violated constraint.
  void validate(std::size_t dataset_size) const;
};

/// Adam / plain SGD over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, std::size_t parameter_count);
  void step(std::span<double> params, std::span<const double> grads);

 private:
  TrainConfig cfg_;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
  std::size_t steps_ = 0;
};

struct TrainResult {
  Mlp net;
  /// Mean training loss per epoch (sample-weighted across minibatches).
  std::vector<double> loss_history;
};

/// Minibatch training; data order is reshuffled each epoch from cfg.seed.
/// A non-finite loss aborts with TrainingError naming the epoch.
TrainResult train(Mlp net, const Matrix& inputs, const Matrix& targets, const TrainConfig& cfg, Loss loss);

}  // namespace uqlab::nn
