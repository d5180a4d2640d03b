#include "uqlab/uq/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "uqlab/error.hpp"

namespace uqlab::uq {

namespace {

/// Location of one stochastic parameter inside the mean network.
struct StochasticSlot {
  std::size_t layer;
  bool is_bias;
  std::size_t index;
  double mean;
  double stddev;
};

std::vector<StochasticSlot> find_stochastic(const StochasticNet& net) {
  std::vector<StochasticSlot> slots;
  for (std::size_t li = 0; li < net.layers().size(); ++li) {
    const auto& l = net.layers()[li];
    auto sd = l.stddev.values();
    auto mu = l.mean.values();
    for (std::size_t i = 0; i < sd.size(); ++i) {
      if (sd[i] > 0.0) slots.push_back({li, false, i, mu[i], sd[i]});
    }
    for (std::size_t j = 0; j < l.bias_stddev.size(); ++j) {
      if (l.bias_stddev[j] > 0.0) slots.push_back({li, true, j, l.bias_mean[j], l.bias_stddev[j]});
    }
  }
  return slots;
}

double& slot_ref(nn::Mlp& net, const StochasticSlot& slot) {
  auto& layer = net.layers()[slot.layer];
  return slot.is_bias ? layer.bias[slot.index] : layer.weights.values()[slot.index];
}

/// Abscissae and trapezoid-times-density weights in one dimension.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule make_rule(const StochasticSlot& slot, const QuadratureGrid& grid) {
  Rule rule;
  const double lo = slot.mean - grid.half_width * slot.stddev;
  const double step = 2.0 * grid.half_width * slot.stddev / static_cast<double>(grid.points - 1);
  const double norm = 1.0 / (slot.stddev * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t k = 0; k < grid.points; ++k) {
    const double w = lo + step * static_cast<double>(k);
    const double z = (w - slot.mean) / slot.stddev;
    const double end_factor = (k == 0 || k + 1 == grid.points) ? 0.5 : 1.0;
    rule.nodes.push_back(w);
    rule.weights.push_back(end_factor * step * norm * std::exp(-0.5 * z * z));
  }
  return rule;
}

}  // namespace

Moments predictive_posterior_quadrature(const StochasticNet& net, const Matrix& inputs, const QuadratureGrid& grid) {
  if (grid.points < 3) throw ConfigError("quadrature grid needs at least 3 points");
  if (!(grid.half_width >= 6.0)) throw ConfigError("quadrature grid must cover at least mean +- 6 stddev");
  const auto slots = find_stochastic(net);
  if (slots.size() > kMaxQuadratureWeights) {
    throw CapabilityError("quadrature over " + std::to_string(slots.size()) +
                          " stochastic parameters is intractable; at most " +
                          std::to_string(kMaxQuadratureWeights) + " are supported");
  }
  nn::Mlp point = mean_network(net);
  if (slots.empty()) {
    Matrix out = nn::predict(point, inputs);
    return {out, Matrix(out.rows(), out.cols())};
  }

  std::vector<Rule> rules;
  for (const auto& s : slots) rules.push_back(make_rule(s, grid));
  const std::size_t n0 = rules[0].nodes.size();
  const std::size_t n1 = rules.size() > 1 ? rules[1].nodes.size() : 1;

  // Outputs are stored so the variance can use the two-pass formula.
  std::vector<Matrix> outputs;
  std::vector<double> weights;
  outputs.reserve(n0 * n1);
  weights.reserve(n0 * n1);
  for (std::size_t a = 0; a < n0; ++a) {
    slot_ref(point, slots[0]) = rules[0].nodes[a];
    for (std::size_t b = 0; b < n1; ++b) {
      double w = rules[0].weights[a];
      if (rules.size() > 1) {
        slot_ref(point, slots[1]) = rules[1].nodes[b];
        w *= rules[1].weights[b];
      }
      outputs.push_back(nn::predict(point, inputs));
      weights.push_back(w);
    }
  }

  double mass = 0.0;
  for (double w : weights) mass += w;
  Moments m{Matrix(outputs.front().rows(), outputs.front().cols()),
            Matrix(outputs.front().rows(), outputs.front().cols())};
  for (std::size_t i = 0; i < outputs.size(); ++i) m.mean += outputs[i] * (weights[i] / mass);
  auto mean = m.mean.values();
  auto var = m.variance.values();
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    auto out = outputs[i].values();
    const double w = weights[i] / mass;
    for (std::size_t j = 0; j < var.size(); ++j) var[j] += w * (out[j] - mean[j]) * (out[j] - mean[j]);
  }
  return m;
}

}  // namespace uqlab::uq
