#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uqlab/nn/loss.hpp"
#include "uqlab/nn/matrix.hpp"
#include "uqlab/nn/mlp.hpp"

namespace uqlab::nn {

struct LayerGradient {
  Matrix weights;
  std::vector<double> bias;
};

/// Gradient of a scalar loss, shaped like the network it belongs to.
struct Gradients {
  std::vector<LayerGradient> layers;
  std::optional<LayerGradient> variance_head;

  static Gradients zeros_like(const Mlp& net);
  /// Same flattening order as Mlp::parameters().
  static Gradients from_flat(const Mlp& net, std::span<const double> values);
  std::vector<double> flatten() const;
};

struct LossAndGradients {
  double loss = 0.0;
  Gradients gradients;
};

/// Loss and its analytic gradient from a single forward pass.
LossAndGradients value_and_gradients(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss,
                                     const HiddenMasks* masks = nullptr);

/// Analytic gradients by reverse-mode propagation through the dense stack.
Gradients backward(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss,
                   const HiddenMasks* masks = nullptr);

/// Central differences (L(theta + h) - L(theta - h)) / 2h for every parameter.
/// Test oracle for backward(); h must be positive.
Gradients finite_diff_grad(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss,
                           double h = 1e-5);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor).
double max_relative_error(const Gradients& a, const Gradients& b, double floor = 1e-7);

}  // namespace uqlab::nn
