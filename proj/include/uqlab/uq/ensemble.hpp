#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uqlab/nn/matrix.hpp"
#include "uqlab/nn/mlp.hpp"
#include "uqlab/nn/train.hpp"

namespace uqlab::uq {

using nn::Matrix;

/// Two-moment summary of a predictive distribution, one entry per
/// (input row, output). total == aleatoric + epistemic by construction.
struct PredictiveSummary {
  Matrix mean;
  Matrix aleatoric;
  Matrix epistemic;
  Matrix total;
};

/// Raw heads of one member: mu_i(x) and sigma_i^2(x).
struct MemberOutput {
  Matrix mean;
  Matrix variance;
};

struct DeepEnsemble {
  std::vector<nn::Mlp> members;
  std::vector<std::vector<double>> loss_histories;

  std::size_t size() const noexcept { return members.size(); }
};

inline constexpr std::size_t kDefaultEnsembleSize = 5;

/// Trains `member_count` gaussian-head networks with the NLL loss on all of
/// the data. Member i draws its initialization and its shuffling seed from
/// an RNG stream derived from (cfg.seed, i), so parallel and serial runs give
/// identical ensembles. The architecture's head is forced to gaussian.
DeepEnsemble ensemble_train(const Matrix& inputs, const Matrix& targets, std::size_t member_count,
                            const nn::TrainConfig& cfg, nn::Architecture arch, bool parallel = true);

std::vector<MemberOutput> member_outputs(const DeepEnsemble& ensemble, const Matrix& inputs);

/// Uniform Gaussian-mixture moment matching:
///   mean = avg mu_i, aleatoric = avg sigma_i^2, epistemic = avg (mu_i - mean)^2.
PredictiveSummary aggregate(std::span<const MemberOutput> members);

PredictiveSummary ensemble_predict(const DeepEnsemble& ensemble, const Matrix& inputs);

}  // namespace uqlab::uq
