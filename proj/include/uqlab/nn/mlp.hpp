#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uqlab/nn/matrix.hpp"
#include "uqlab/nn/rng.hpp"

namespace uqlab::nn {

enum class Activation { identity, tanh, relu, sigmoid };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

double activate(Activation a, double x);
/// Derivative expressed through the activation output, which is what the
/// backward pass keeps around.
double activation_slope(Activation a, double output);

double sigmoid(double x);
double softplus(double x);

/// Lower bound added to the softplus variance head so sigma^2 never reaches 0.
inline constexpr double kVarianceFloor = 1e-6;

struct DenseLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::identity;

  std::size_t in_size() const noexcept { return weights.cols(); }
  std::size_t out_size() const noexcept { return weights.rows(); }

  /// Pre-activations inputs * W^T + b.
  Matrix affine(const Matrix& inputs) const;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Output interpretation of the final layer.
///   point:       plain regression output.
///   gaussian:    mean head plus a raw-variance head reading the same final
///                hidden representation; sigma^2 = softplus(raw) + floor.
///   categorical: final layer emits logits, forward returns softmax probabilities.
enum class Head { point, gaussian, categorical };

std::string_view to_string(Head h);

class Mlp {
 public:
  Mlp() = default;
  /// The last entry of `layers` is the output (mean) head. A gaussian head
  /// requires `variance_head`, whose input size equals that of the last layer.
  Mlp(std::vector<DenseLayer> layers, Head head = Head::point,
      std::optional<DenseLayer> variance_head = std::nullopt);

  Head head() const noexcept { return head_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  /// Mutable access for in-place parameter edits; shapes must be preserved.
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const std::optional<DenseLayer>& variance_head() const noexcept { return variance_head_; }
  std::optional<DenseLayer>& variance_head() noexcept { return variance_head_; }

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::size_t hidden_layer_count() const noexcept { return layers_.empty() ? 0 : layers_.size() - 1; }

  /// Parameters flattened as: per layer weights (row-major) then bias,
  /// followed by the variance head if present.
  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  void validate() const;

  std::vector<DenseLayer> layers_;
  Head head_ = Head::point;
  std::optional<DenseLayer> variance_head_;
};

struct Architecture {
  std::size_t inputs = 1;
  std::size_t hidden_layers = 2;
  std::size_t hidden_units = 64;
  Activation activation = Activation::tanh;
  std::size_t outputs = 1;
  Head head = Head::point;
};

/// Glorot-uniform weights, zero biases.
Mlp make_mlp(const Architecture& arch, Rng& rng);

/// Per-hidden-layer multiplicative masks (entries 0 or 1/(1-p)), each shaped
/// like that layer's activations for the batch.
using HiddenMasks = std::vector<Matrix>;

HiddenMasks sample_dropout_masks(const Mlp& net, std::size_t batch_rows, double rate, Rng& rng);

struct ForwardPass {
  /// activations[0] is the input; activations[i + 1] is what layer i passes
  /// on (after masking).
  std::vector<Matrix> activations;
  /// Unmasked activation outputs per hidden layer; needed for the slope.
  std::vector<Matrix> unmasked;
  /// Point prediction, gaussian mean, or class probabilities.
  Matrix output;
  Matrix logits;        // categorical only
  Matrix raw_variance;  // gaussian only
  Matrix variance;      // gaussian only
};

ForwardPass forward(const Mlp& net, const Matrix& inputs, const HiddenMasks* masks = nullptr);

/// Output head only; cheaper than forward when activations are not needed.
Matrix predict(const Mlp& net, const Matrix& inputs);

}  // namespace uqlab::nn
