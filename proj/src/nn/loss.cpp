#include "uqlab/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uqlab/error.hpp"

namespace uqlab::nn {

std::string_view to_string(Loss l) {
  switch (l) {
    case Loss::mse: return "mse";
    case Loss::gaussian_nll: return "gaussian_nll";
    case Loss::cross_entropy: return "cross_entropy";
  }
  return "?";
}

double loss_mse(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "loss_mse");
  if (pred.empty()) throw DimensionError("loss_mse: empty input");
  double total = 0.0;
  auto p = pred.values();
  auto t = target.values();
  for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] - t[i]) * (p[i] - t[i]);
  return total / static_cast<double>(p.size());
}

double loss_gaussian_nll(double mu, double var, double y) {
  if (!(var > 0.0)) throw DomainError("loss_gaussian_nll: variance must be positive, got " + std::to_string(var));
  const double r = mu - y;
  return 0.5 * std::log(var) + r * r / (2.0 * var);
}

double loss_gaussian_nll(const Matrix& mu, const Matrix& var, const Matrix& y) {
  require_same_shape(mu, var, "loss_gaussian_nll");
  require_same_shape(mu, y, "loss_gaussian_nll");
  if (mu.empty()) throw DimensionError("loss_gaussian_nll: empty input");
  double total = 0.0;
  auto m = mu.values();
  auto v = var.values();
  auto t = y.values();
  for (std::size_t i = 0; i < m.size(); ++i) total += loss_gaussian_nll(m[i], v[i], t[i]);
  return total / static_cast<double>(m.size());
}

double loss_cross_entropy(const Matrix& logits, const Matrix& targets) {
  require_same_shape(logits, targets, "loss_cross_entropy");
  if (logits.empty()) throw DimensionError("loss_cross_entropy: empty input");
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto z = logits.row(r);
    auto t = targets.row(r);
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    const double log_norm = top + std::log(sum);
    for (std::size_t k = 0; k < z.size(); ++k) total -= t[k] * (z[k] - log_norm);
  }
  return total / static_cast<double>(logits.rows());
}

void require_compatible(const Mlp& net, Loss loss) {
  const bool ok = (loss == Loss::mse && net.head() == Head::point) ||
                  (loss == Loss::gaussian_nll && net.head() == Head::gaussian) ||
                  (loss == Loss::cross_entropy && net.head() == Head::categorical);
  if (!ok) {
    throw ConfigError("loss " + std::string(to_string(loss)) + " cannot train a " +
                      std::string(to_string(net.head())) + " head");
  }
}

double evaluate_loss(const ForwardPass& pass, const Matrix& targets, Loss loss) {
  switch (loss) {
    case Loss::mse: return loss_mse(pass.output, targets);
    case Loss::gaussian_nll: return loss_gaussian_nll(pass.output, pass.variance, targets);
    case Loss::cross_entropy: return loss_cross_entropy(pass.logits, targets);
  }
  return 0.0;
}

double evaluate_loss(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss,
                     const HiddenMasks* masks) {
  require_compatible(net, loss);
  return evaluate_loss(forward(net, inputs, masks), targets, loss);
}

}  // namespace uqlab::nn
