#include "uqlab/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "uqlab/error.hpp"
#include "uqlab/nn/gradients.hpp"
#include "uqlab/nn/rng.hpp"

namespace uqlab::nn {

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "sgd") return OptimizerKind::sgd;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate(std::size_t dataset_size) const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be > 0");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (dataset_size == 0) throw ConfigError("training set is empty");
  if (batch_size > dataset_size) {
    throw ConfigError("batch size " + std::to_string(batch_size) + " exceeds dataset size " +
                      std::to_string(dataset_size));
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be > 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
}

Optimizer::Optimizer(const TrainConfig& cfg, std::size_t parameter_count) : cfg_(cfg) {
  if (cfg_.optimizer == OptimizerKind::adam) {
    first_moment_.assign(parameter_count, 0.0);
    second_moment_.assign(parameter_count, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grads) {
  ++steps_;
  if (cfg_.optimizer == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg_.learning_rate * grads[i];
    return;
  }
  const double t = static_cast<double>(steps_);
  const double bias1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    first_moment_[i] = cfg_.beta1 * first_moment_[i] + (1.0 - cfg_.beta1) * grads[i];
    second_moment_[i] = cfg_.beta2 * second_moment_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
    const double m_hat = first_moment_[i] / bias1;
    const double v_hat = second_moment_[i] / bias2;
    params[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
  }
}

TrainResult train(Mlp net, const Matrix& inputs, const Matrix& targets, const TrainConfig& cfg, Loss loss) {
  if (inputs.rows() != targets.rows()) {
    throw DimensionError("train: inputs " + inputs.shape() + " vs targets " + targets.shape());
  }
  cfg.validate(inputs.rows());
  require_compatible(net, loss);

  Rng rng(cfg.seed);
  Optimizer optimizer(cfg, net.parameter_count());
  std::vector<double> params = net.parameters();
  std::vector<std::size_t> order(inputs.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.loss_history.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own RNG keeps the order library-independent.
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      const Matrix x = inputs.gather_rows(batch);
      const Matrix y = targets.gather_rows(batch);
      HiddenMasks masks;
      const HiddenMasks* mask_ptr = nullptr;
      if (cfg.dropout > 0.0) {
        masks = sample_dropout_masks(net, x.rows(), cfg.dropout, rng);
        mask_ptr = &masks;
      }
      auto [batch_loss, gradients] = value_and_gradients(net, x, y, loss, mask_ptr);
      if (!std::isfinite(batch_loss)) throw TrainingError("non-finite training loss", epoch + 1);
      epoch_loss += batch_loss * static_cast<double>(x.rows());
      optimizer.step(params, gradients.flatten());
      net.set_parameters(params);
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) throw TrainingError("non-finite training loss", epoch + 1);
    result.loss_history.push_back(epoch_loss);
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw TrainingError("non-finite parameters after training", cfg.epochs);
  }
  result.net = std::move(net);
  return result;
}

}  // namespace uqlab::nn
