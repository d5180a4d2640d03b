#include "uqlab/uq/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uqlab/error.hpp"

namespace uqlab::uq {

StochasticNet::StochasticNet(std::vector<GaussianWeightLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("stochastic network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    const std::string where = "stochastic layer " + std::to_string(i);
    if (l.mean.empty()) throw DimensionError(where + " has empty weights");
    nn::require_same_shape(l.mean, l.stddev, where.c_str());
    if (l.bias_mean.size() != l.out_size() || l.bias_stddev.size() != l.out_size()) {
      throw DimensionError(where + " bias length does not match weights " + l.mean.shape());
    }
    if (i > 0 && l.in_size() != layers_[i - 1].out_size()) {
      throw DimensionError(where + " weights " + l.mean.shape() + " do not chain with " +
                           layers_[i - 1].mean.shape());
    }
    auto bad = [](double s) { return !(s >= 0.0) || !std::isfinite(s); };
    if (std::any_of(l.stddev.values().begin(), l.stddev.values().end(), bad) ||
        std::any_of(l.bias_stddev.begin(), l.bias_stddev.end(), bad)) {
      throw DomainError(where + " has a negative or non-finite stddev");
    }
  }
}

std::size_t StochasticNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.mean.size() + l.bias_mean.size();
  return n;
}

std::size_t StochasticNet::stochastic_parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    n += static_cast<std::size_t>(std::count_if(l.stddev.values().begin(), l.stddev.values().end(),
                                                [](double s) { return s > 0.0; }));
    n += static_cast<std::size_t>(
        std::count_if(l.bias_stddev.begin(), l.bias_stddev.end(), [](double s) { return s > 0.0; }));
  }
  return n;
}

std::size_t dense_parameter_count(const StochasticSpec& spec) {
  const std::size_t w = spec.width;
  return spec.inputs * w + w + (spec.depth - 1) * (w * w + w) + w * spec.outputs + spec.outputs;
}

StochasticNet make_stochastic_net(const StochasticSpec& spec, Rng& rng) {
  if (spec.inputs == 0 || spec.outputs == 0 || spec.depth == 0 || spec.width == 0) {
    throw ConfigError("stochastic network sizes must be positive");
  }
  if (!(spec.stddev > 0.0)) throw ConfigError("weight stddev must be positive");
  std::vector<GaussianWeightLayer> layers;
  auto add = [&](std::size_t in, std::size_t out, nn::Activation act) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    GaussianWeightLayer l{Matrix(out, in), Matrix(out, in, spec.stddev), std::vector<double>(out, 0.0),
                          std::vector<double>(out, spec.stddev), act};
    for (double& m : l.mean.values()) m = rng.uniform(-limit, limit);
    layers.push_back(std::move(l));
  };
  add(spec.inputs, spec.width, spec.activation);
  for (std::size_t i = 1; i < spec.depth; ++i) add(spec.width, spec.width, spec.activation);
  add(spec.width, spec.outputs, nn::Activation::identity);
  return StochasticNet(std::move(layers));
}

StochasticNet from_mlp(const nn::Mlp& net, double stddev) {
  if (!(stddev >= 0.0)) throw DomainError("stddev must be non-negative");
  if (net.head() != nn::Head::point) throw ConfigError("only point-head networks can be lifted");
  std::vector<GaussianWeightLayer> layers;
  for (const auto& l : net.layers()) {
    layers.push_back({l.weights, Matrix(l.out_size(), l.in_size(), stddev), l.bias,
                      std::vector<double>(l.out_size(), stddev), l.activation});
  }
  return StochasticNet(std::move(layers));
}

nn::Mlp mean_network(const StochasticNet& net) {
  std::vector<nn::DenseLayer> layers;
  for (const auto& l : net.layers()) layers.push_back({l.mean, l.bias_mean, l.activation});
  return nn::Mlp(std::move(layers));
}

nn::Mlp sample_weights(const StochasticNet& net, Rng& rng) {
  std::vector<nn::DenseLayer> layers;
  layers.reserve(net.layers().size());
  for (const auto& l : net.layers()) {
    nn::DenseLayer d{Matrix(l.out_size(), l.in_size()), std::vector<double>(l.out_size()), l.activation};
    auto w = d.weights.values();
    auto mu = l.mean.values();
    auto sd = l.stddev.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = mu[i] + sd[i] * rng.normal();
    for (std::size_t j = 0; j < d.bias.size(); ++j) d.bias[j] = l.bias_mean[j] + l.bias_stddev[j] * rng.normal();
    layers.push_back(std::move(d));
  }
  return nn::Mlp(std::move(layers));
}

Matrix MonteCarloPrediction::sample(std::size_t s) const {
  auto row = samples.row(s);
  return Matrix(input_rows, outputs, std::vector<double>(row.begin(), row.end()));
}

void summarize(MonteCarloPrediction& p) {
  const std::size_t n = p.samples.rows();
  p.mean = Matrix(p.input_rows, p.outputs);
  p.variance = Matrix(p.input_rows, p.outputs);
  if (n == 0) return;
  // Shifted by the first sample: identical samples give exactly zero variance.
  auto mean = p.mean.values();
  auto var = p.variance.values();
  auto origin = p.samples.row(0);
  std::vector<double> shift_sum(mean.size(), 0.0), shift_sq(mean.size(), 0.0);
  for (std::size_t s = 1; s < n; ++s) {
    auto row = p.samples.row(s);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double d = row[j] - origin[j];
      shift_sum[j] += d;
      shift_sq[j] += d * d;
    }
  }
  const double count = static_cast<double>(n);
  for (std::size_t j = 0; j < mean.size(); ++j) {
    mean[j] = origin[j] + shift_sum[j] / count;
    if (n > 1) var[j] = std::max(0.0, (shift_sq[j] - shift_sum[j] * shift_sum[j] / count) / (count - 1.0));
  }
}

MonteCarloPrediction stochastic_predict(const StochasticNet& net, const Matrix& inputs, std::size_t n_samples,
                                        Rng& rng, std::optional<Deadline> deadline) {
  if (n_samples == 0) throw ConfigError("stochastic_predict needs at least one sample");
  if (inputs.cols() != net.input_size()) {
    throw DimensionError("stochastic_predict: input " + inputs.shape() + " vs first-layer weights " +
                         net.layers().front().mean.shape());
  }
  const std::size_t rows = inputs.rows();
  MonteCarloPrediction result;
  result.input_rows = rows;
  result.outputs = net.output_size();
  result.samples = Matrix(n_samples, rows * result.outputs);

  std::size_t widest = 0;
  for (const auto& l : net.layers()) widest = std::max(widest, l.in_size());
  std::vector<double> weight_row(widest);
  std::size_t completed = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Matrix activations = inputs;
    bool stopped = false;
    for (const auto& layer : net.layers()) {
      if (deadline && std::chrono::steady_clock::now() > *deadline) {
        stopped = true;
        break;
      }
      const std::size_t in = layer.in_size();
      const std::size_t out = layer.out_size();
      Matrix next(rows, out);
      for (std::size_t j = 0; j < out; ++j) {
        auto mu = layer.mean.row(j);
        auto sd = layer.stddev.row(j);
        for (std::size_t k = 0; k < in; ++k) weight_row[k] = mu[k] + sd[k] * rng.normal();
        for (std::size_t r = 0; r < rows; ++r) {
          auto x = activations.row(r);
          double acc = 0.0;
          for (std::size_t k = 0; k < in; ++k) acc += x[k] * weight_row[k];
          next(r, j) = acc;
        }
      }
      for (std::size_t j = 0; j < out; ++j) {
        const double b = layer.bias_mean[j] + layer.bias_stddev[j] * rng.normal();
        for (std::size_t r = 0; r < rows; ++r) next(r, j) = nn::activate(layer.activation, next(r, j) + b);
      }
      activations = std::move(next);
    }
    if (stopped) {
      result.truncated = true;
      break;
    }
    std::copy(activations.values().begin(), activations.values().end(), result.samples.row(s).begin());
    ++completed;
  }
  if (completed < n_samples) {
    std::vector<double> kept(result.samples.values().begin(),
                             result.samples.values().begin() + static_cast<std::ptrdiff_t>(completed * rows * result.outputs));
    result.samples = Matrix(completed, rows * result.outputs, std::move(kept));
  }
  summarize(result);
  return result;
}

}  // namespace uqlab::uq
