#include "uqlab/nn/gradients.hpp"

#include <algorithm>
#include <cmath>

#include "uqlab/error.hpp"

namespace uqlab::nn {

namespace {

LayerGradient zeros_for(const DenseLayer& l) {
  return {Matrix(l.weights.rows(), l.weights.cols()), std::vector<double>(l.bias.size(), 0.0)};
}

/// Fills grad for a layer given delta (n x out) at its pre-activation and the
/// layer input (n x in); returns delta propagated to the input.
Matrix accumulate_layer(const DenseLayer& layer, const Matrix& delta, const Matrix& input, LayerGradient& grad) {
  grad.weights = transposed_matmul(delta, input);
  std::fill(grad.bias.begin(), grad.bias.end(), 0.0);
  for (std::size_t r = 0; r < delta.rows(); ++r) {
    auto row = delta.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) grad.bias[c] += row[c];
  }
  return matmul(delta, layer.weights);
}

void scale_by_slope(Matrix& delta, const Matrix& outputs, Activation act) {
  if (act == Activation::identity) return;
  auto d = delta.values();
  auto o = outputs.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= activation_slope(act, o[i]);
}

}  // namespace

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (const auto& l : net.layers()) g.layers.push_back(zeros_for(l));
  if (net.variance_head()) g.variance_head = zeros_for(*net.variance_head());
  return g;
}

Gradients Gradients::from_flat(const Mlp& net, std::span<const double> values) {
  if (values.size() != net.parameter_count()) {
    throw DimensionError("gradient length " + std::to_string(values.size()) + " vs " +
                         std::to_string(net.parameter_count()) + " parameters");
  }
  Gradients g = Gradients::zeros_like(net);
  std::size_t pos = 0;
  auto pull = [&](LayerGradient& lg) {
    auto w = lg.weights.values();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.begin());
    pos += w.size();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), lg.bias.size(), lg.bias.begin());
    pos += lg.bias.size();
  };
  for (auto& lg : g.layers) pull(lg);
  if (g.variance_head) pull(*g.variance_head);
  return g;
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> out;
  auto push = [&out](const LayerGradient& lg) {
    out.insert(out.end(), lg.weights.values().begin(), lg.weights.values().end());
    out.insert(out.end(), lg.bias.begin(), lg.bias.end());
  };
  for (const auto& lg : layers) push(lg);
  if (variance_head) push(*variance_head);
  return out;
}

Gradients backward(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss,
                   const HiddenMasks* masks) {
  return value_and_gradients(net, inputs, targets, loss, masks).gradients;
}

LossAndGradients value_and_gradients(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss,
                                     const HiddenMasks* masks) {
  require_compatible(net, loss);
  const ForwardPass pass = forward(net, inputs, masks);
  require_same_shape(pass.output, targets, "backward: prediction vs target");
  const double loss_value = evaluate_loss(pass, targets, loss);

  const auto& layers = net.layers();
  Gradients grads = Gradients::zeros_like(net);
  const double n_rows = static_cast<double>(inputs.rows());
  const double n_elems = static_cast<double>(targets.size());

  // delta: dL / d(pre-activation) of the output layer.
  Matrix delta(pass.output.rows(), pass.output.cols());
  Matrix variance_delta;
  auto d = delta.values();
  auto y = targets.values();
  switch (loss) {
    case Loss::mse: {
      auto p = pass.output.values();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = 2.0 * (p[i] - y[i]) / n_elems;
      scale_by_slope(delta, pass.output, layers.back().activation);
      break;
    }
    case Loss::gaussian_nll: {
      auto mu = pass.output.values();
      auto var = pass.variance.values();
      auto raw = pass.raw_variance.values();
      variance_delta = Matrix(delta.rows(), delta.cols());
      auto vd = variance_delta.values();
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = mu[i] - y[i];
        d[i] = r / var[i] / n_elems;
        const double dvar = 0.5 / var[i] - r * r / (2.0 * var[i] * var[i]);
        vd[i] = dvar * sigmoid(raw[i]) / n_elems;
      }
      scale_by_slope(delta, pass.output, layers.back().activation);
      scale_by_slope(variance_delta, pass.raw_variance, net.variance_head()->activation);
      break;
    }
    case Loss::cross_entropy: {
      auto p = pass.output.values();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = (p[i] - y[i]) / n_rows;
      scale_by_slope(delta, pass.logits, layers.back().activation);
      break;
    }
  }

  for (std::size_t li = layers.size(); li-- > 0;) {
    const Matrix& layer_input = pass.activations[li];
    Matrix upstream = accumulate_layer(layers[li], delta, layer_input, grads.layers[li]);
    if (li + 1 == layers.size() && loss == Loss::gaussian_nll) {
      upstream += accumulate_layer(*net.variance_head(), variance_delta, layer_input, *grads.variance_head);
    }
    if (li == 0) break;
    // Through the mask, then the hidden activation of layer li - 1.
    if (masks) upstream = hadamard(upstream, (*masks)[li - 1]);
    scale_by_slope(upstream, pass.unmasked[li - 1], layers[li - 1].activation);
    delta = std::move(upstream);
  }
  return {loss_value, std::move(grads)};
}

Gradients finite_diff_grad(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss, double h) {
  if (!(h > 0.0)) throw DomainError("finite_diff_grad: step h must be positive");
  Mlp probe = net;
  std::vector<double> theta = net.parameters();
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    probe.set_parameters(theta);
    const double up = evaluate_loss(probe, inputs, targets, loss);
    theta[i] = saved - h;
    probe.set_parameters(theta);
    const double down = evaluate_loss(probe, inputs, targets, loss);
    theta[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return Gradients::from_flat(net, grad);
}

double max_relative_error(const Gradients& a, const Gradients& b, double floor) {
  const auto fa = a.flatten();
  const auto fb = b.flatten();
  if (fa.size() != fb.size()) throw DimensionError("max_relative_error: gradient sizes differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double scale = std::max({std::abs(fa[i]), std::abs(fb[i]), floor});
    worst = std::max(worst, std::abs(fa[i] - fb[i]) / scale);
  }
  return worst;
}

}  // namespace uqlab::nn
