#include "uqlab/uq/mc_masks.hpp"

#include <algorithm>

#include "uqlab/error.hpp"

namespace uqlab::uq {

namespace {

void check_request(double rate, std::size_t n_samples) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("mask rate must lie in [0, 1)");
  if (n_samples == 0) throw ConfigError("Monte-Carlo prediction needs at least one sample");
}

MonteCarloPrediction empty_prediction(const nn::Mlp& net, const Matrix& inputs, std::size_t n_samples) {
  MonteCarloPrediction p;
  p.input_rows = inputs.rows();
  p.outputs = net.output_size();
  p.samples = Matrix(n_samples, p.input_rows * p.outputs);
  return p;
}

void store(MonteCarloPrediction& p, std::size_t s, const Matrix& output) {
  std::copy(output.values().begin(), output.values().end(), p.samples.row(s).begin());
}

}  // namespace

MonteCarloPrediction mc_dropout_predict(const nn::Mlp& net, const Matrix& inputs, double rate,
                                        std::size_t n_samples, Rng& rng) {
  check_request(rate, n_samples);
  MonteCarloPrediction p = empty_prediction(net, inputs, n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const nn::HiddenMasks masks = nn::sample_dropout_masks(net, inputs.rows(), rate, rng);
    store(p, s, nn::forward(net, inputs, &masks).output);
  }
  summarize(p);
  return p;
}

nn::Mlp dropconnect_sample(const nn::Mlp& net, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("mask rate must lie in [0, 1)");
  const double keep_scale = 1.0 / (1.0 - rate);
  nn::Mlp masked = net;
  auto mask = [&](nn::DenseLayer& l) {
    for (double& w : l.weights.values()) w = rng.bernoulli(rate) ? 0.0 : w * keep_scale;
  };
  for (auto& l : masked.layers()) mask(l);
  if (masked.variance_head()) mask(*masked.variance_head());
  return masked;
}

MonteCarloPrediction mc_dropconnect_predict(const nn::Mlp& net, const Matrix& inputs, double rate,
                                            std::size_t n_samples, Rng& rng) {
  check_request(rate, n_samples);
  MonteCarloPrediction p = empty_prediction(net, inputs, n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) store(p, s, nn::predict(dropconnect_sample(net, rate, rng), inputs));
  summarize(p);
  return p;
}

}  // namespace uqlab::uq
