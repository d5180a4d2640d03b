#include "uqlab/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uqlab/error.hpp"

namespace uqlab::nn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Head h) {
  switch (h) {
    case Head::point: return "point";
    case Head::gaussian: return "gaussian";
    case Head::categorical: return "categorical";
  }
  return "?";
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double activate(Activation a, double x) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::tanh: return std::tanh(x);
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::sigmoid: return sigmoid(x);
  }
  return x;
}

double activation_slope(Activation a, double output) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::tanh: return 1.0 - output * output;
    case Activation::relu: return output > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return output * (1.0 - output);
  }
  return 1.0;
}

Matrix DenseLayer::affine(const Matrix& inputs) const {
  if (inputs.cols() != in_size()) {
    throw DimensionError("dense layer expects " + std::to_string(in_size()) + " input columns: input " +
                         inputs.shape() + " vs weights " + weights.shape());
  }
  Matrix z = matmul_transposed(inputs, weights);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
  }
  return z;
}

namespace {

void apply_activation(Matrix& m, Activation a) {
  if (a == Activation::identity) return;
  for (double& v : m.values()) v = activate(a, v);
}

void check_layer(const DenseLayer& layer, std::size_t index) {
  if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
    throw DimensionError("layer " + std::to_string(index) + " has empty weights");
  }
  if (layer.bias.size() != layer.out_size()) {
    throw DimensionError("layer " + std::to_string(index) + " bias length " +
                         std::to_string(layer.bias.size()) + " vs weights " + layer.weights.shape());
  }
}

void softmax_rows(const Matrix& logits, Matrix& probs) {
  probs = logits;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto row = probs.row(r);
    const double top = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : row) v /= total;
  }
}

}  // namespace

Mlp::Mlp(std::vector<DenseLayer> layers, Head head, std::optional<DenseLayer> variance_head)
    : layers_(std::move(layers)), head_(head), variance_head_(std::move(variance_head)) {
  validate();
}

void Mlp::validate() const {
  if (layers_.empty()) throw DimensionError("network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    check_layer(layers_[i], i);
    if (i > 0 && layers_[i].in_size() != layers_[i - 1].out_size()) {
      throw DimensionError("layer " + std::to_string(i) + " weights " + layers_[i].weights.shape() +
                           " do not chain with layer " + std::to_string(i - 1) + " weights " +
                           layers_[i - 1].weights.shape());
    }
  }
  if (head_ == Head::gaussian) {
    if (!variance_head_) throw DimensionError("gaussian head requires a variance head layer");
    check_layer(*variance_head_, layers_.size());
    if (variance_head_->in_size() != layers_.back().in_size() ||
        variance_head_->out_size() != layers_.back().out_size()) {
      throw DimensionError("variance head " + variance_head_->weights.shape() + " must match mean head " +
                           layers_.back().weights.shape());
    }
  } else if (variance_head_) {
    throw DimensionError("variance head given for a non-gaussian network");
  }
}

std::size_t Mlp::input_size() const { return layers_.empty() ? 0 : layers_.front().in_size(); }
std::size_t Mlp::output_size() const { return layers_.empty() ? 0 : layers_.back().out_size(); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  if (variance_head_) n += variance_head_->weights.size() + variance_head_->bias.size();
  return n;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  auto push = [&out](const DenseLayer& l) {
    out.insert(out.end(), l.weights.values().begin(), l.weights.values().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  };
  for (const auto& l : layers_) push(l);
  if (variance_head_) push(*variance_head_);
  return out;
}

void Mlp::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw DimensionError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                         std::to_string(values.size()));
  }
  std::size_t pos = 0;
  auto pull = [&](DenseLayer& l) {
    auto w = l.weights.values();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.begin());
    pos += w.size();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.begin());
    pos += l.bias.size();
  };
  for (auto& l : layers_) pull(l);
  if (variance_head_) pull(*variance_head_);
}

Mlp make_mlp(const Architecture& arch, Rng& rng) {
  if (arch.inputs == 0 || arch.outputs == 0 || (arch.hidden_layers > 0 && arch.hidden_units == 0)) {
    throw ConfigError("architecture sizes must be positive");
  }
  auto glorot = [&rng](std::size_t in, std::size_t out, Activation act) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer layer{Matrix(out, in), std::vector<double>(out, 0.0), act};
    for (double& w : layer.weights.values()) w = rng.uniform(-limit, limit);
    return layer;
  };
  std::vector<DenseLayer> layers;
  std::size_t width = arch.inputs;
  for (std::size_t i = 0; i < arch.hidden_layers; ++i) {
    layers.push_back(glorot(width, arch.hidden_units, arch.activation));
    width = arch.hidden_units;
  }
  layers.push_back(glorot(width, arch.outputs, Activation::identity));
  std::optional<DenseLayer> variance_head;
  if (arch.head == Head::gaussian) variance_head = glorot(width, arch.outputs, Activation::identity);
  return Mlp(std::move(layers), arch.head, std::move(variance_head));
}

HiddenMasks sample_dropout_masks(const Mlp& net, std::size_t batch_rows, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
  const double keep_scale = 1.0 / (1.0 - rate);
  HiddenMasks masks;
  masks.reserve(net.hidden_layer_count());
  for (std::size_t i = 0; i < net.hidden_layer_count(); ++i) {
    Matrix m(batch_rows, net.layers()[i].out_size());
    for (double& v : m.values()) v = rng.bernoulli(rate) ? 0.0 : keep_scale;
    masks.push_back(std::move(m));
  }
  return masks;
}

ForwardPass forward(const Mlp& net, const Matrix& inputs, const HiddenMasks* masks) {
  if (inputs.cols() != net.input_size()) {
    throw DimensionError("forward: input " + inputs.shape() + " vs first-layer weights " +
                         net.layers().front().weights.shape());
  }
  if (masks && masks->size() != net.hidden_layer_count()) {
    throw DimensionError("forward: expected one mask per hidden layer");
  }
  ForwardPass pass;
  const auto& layers = net.layers();
  pass.activations.reserve(layers.size());
  pass.activations.push_back(inputs);
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    Matrix a = layers[i].affine(pass.activations.back());
    apply_activation(a, layers[i].activation);
    pass.unmasked.push_back(a);
    if (masks) a = hadamard(a, (*masks)[i]);
    pass.activations.push_back(std::move(a));
  }
  const Matrix& hidden = pass.activations.back();
  Matrix out = layers.back().affine(hidden);
  apply_activation(out, layers.back().activation);
  switch (net.head()) {
    case Head::point:
      pass.output = std::move(out);
      break;
    case Head::categorical:
      pass.logits = std::move(out);
      softmax_rows(pass.logits, pass.output);
      break;
    case Head::gaussian: {
      pass.output = std::move(out);
      pass.raw_variance = net.variance_head()->affine(hidden);
      apply_activation(pass.raw_variance, net.variance_head()->activation);
      pass.variance = pass.raw_variance;
      for (double& v : pass.variance.values()) v = softplus(v) + kVarianceFloor;
      break;
    }
  }
  return pass;
}

Matrix predict(const Mlp& net, const Matrix& inputs) { return forward(net, inputs).output; }

}  // namespace uqlab::nn
