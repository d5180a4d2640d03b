#include "uqlab/uq/ensemble.hpp"

#include <exception>
#include <thread>

#include "uqlab/error.hpp"
#include "uqlab/nn/rng.hpp"

namespace uqlab::uq {

DeepEnsemble ensemble_train(const Matrix& inputs, const Matrix& targets, std::size_t member_count,
                            const nn::TrainConfig& cfg, nn::Architecture arch, bool parallel) {
  if (member_count < 2) throw ConfigError("an ensemble needs at least 2 members");
  cfg.validate(inputs.rows());
  arch.head = nn::Head::gaussian;
  arch.inputs = inputs.cols();
  arch.outputs = targets.cols();

  DeepEnsemble ensemble;
  ensemble.members.resize(member_count);
  ensemble.loss_histories.resize(member_count);
  std::vector<std::exception_ptr> failures(member_count);

  auto train_member = [&](std::size_t i) {
    try {
      nn::Rng stream = nn::Rng::derive(cfg.seed, i);
      nn::Mlp init = nn::make_mlp(arch, stream);
      nn::TrainConfig member_cfg = cfg;
      member_cfg.seed = stream.next_u64();
      auto result = nn::train(std::move(init), inputs, targets, member_cfg, nn::Loss::gaussian_nll);
      ensemble.members[i] = std::move(result.net);
      ensemble.loss_histories[i] = std::move(result.loss_history);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  if (parallel) {
    std::vector<std::jthread> workers;
    workers.reserve(member_count);
    for (std::size_t i = 0; i < member_count; ++i) workers.emplace_back(train_member, i);
  } else {
    for (std::size_t i = 0; i < member_count; ++i) train_member(i);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return ensemble;
}

std::vector<MemberOutput> member_outputs(const DeepEnsemble& ensemble, const Matrix& inputs) {
  std::vector<MemberOutput> out;
  out.reserve(ensemble.size());
  for (const auto& member : ensemble.members) {
    if (member.head() != nn::Head::gaussian) throw ConfigError("ensemble members must have gaussian heads");
    nn::ForwardPass pass = nn::forward(member, inputs);
    out.push_back({std::move(pass.output), std::move(pass.variance)});
  }
  return out;
}

PredictiveSummary aggregate(std::span<const MemberOutput> members) {
  if (members.empty()) throw ConfigError("cannot aggregate an empty ensemble");
  const Matrix& first = members.front().mean;
  for (const auto& m : members) {
    nn::require_same_shape(first, m.mean, "aggregate");
    nn::require_same_shape(first, m.variance, "aggregate");
  }
  const double count = static_cast<double>(members.size());
  PredictiveSummary s{Matrix(first.rows(), first.cols()), Matrix(first.rows(), first.cols()),
                      Matrix(first.rows(), first.cols()), Matrix(first.rows(), first.cols())};
  for (const auto& m : members) {
    s.mean += m.mean;
    s.aleatoric += m.variance;
  }
  s.mean *= 1.0 / count;
  s.aleatoric *= 1.0 / count;
  // avg (mu_i - mean)^2 equals avg mu_i^2 - mean^2 but cannot go negative.
  auto epi = s.epistemic.values();
  auto mean = s.mean.values();
  for (const auto& m : members) {
    auto mu = m.mean.values();
    for (std::size_t i = 0; i < epi.size(); ++i) epi[i] += (mu[i] - mean[i]) * (mu[i] - mean[i]);
  }
  s.epistemic *= 1.0 / count;
  s.total = s.aleatoric + s.epistemic;
  return s;
}

PredictiveSummary ensemble_predict(const DeepEnsemble& ensemble, const Matrix& inputs) {
  const auto outputs = member_outputs(ensemble, inputs);
  return aggregate(outputs);
}

}  // namespace uqlab::uq
