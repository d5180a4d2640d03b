#pragma once

#include <cstddef>

#include "uqlab/nn/mlp.hpp"
#include "uqlab/uq/stochastic.hpp"

namespace uqlab::uq {

/// MC Dropout: each sample zeroes every hidden activation independently with
/// probability `rate` and scales survivors by 1/(1 - rate). For categorical
/// heads the samples are class probabilities.
MonteCarloPrediction mc_dropout_predict(const nn::Mlp& net, const Matrix& inputs, double rate,
                                        std::size_t n_samples, Rng& rng);

/// MC DropConnect: as above but the mask applies to individual weights of
/// every layer (biases are kept).
MonteCarloPrediction mc_dropconnect_predict(const nn::Mlp& net, const Matrix& inputs, double rate,
                                            std::size_t n_samples, Rng& rng);

/// The network with one DropConnect mask applied to its weights.
nn::Mlp dropconnect_sample(const nn::Mlp& net, double rate, Rng& rng);

}  // namespace uqlab::uq
