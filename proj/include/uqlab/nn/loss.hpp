#pragma once

#include <string_view>

#include "uqlab/nn/matrix.hpp"
#include "uqlab/nn/mlp.hpp"

namespace uqlab::nn {

enum class Loss { mse, gaussian_nll, cross_entropy };

std::string_view to_string(Loss l);

/// Mean squared error over all elements.
double loss_mse(const Matrix& pred, const Matrix& target);

/// log(var)/2 + (mu - y)^2 / (2 var). Throws DomainError for var <= 0.
double loss_gaussian_nll(double mu, double var, double y);
/// Elementwise NLL averaged over all entries.
double loss_gaussian_nll(const Matrix& mu, const Matrix& var, const Matrix& y);

/// -sum_k t_k log softmax(logits)_k averaged over rows; targets are one-hot
/// (or any distribution) rows.
double loss_cross_entropy(const Matrix& logits, const Matrix& targets);

/// The loss a network head is trained with must match the head type.
void require_compatible(const Mlp& net, Loss loss);

double evaluate_loss(const Mlp& net, const Matrix& inputs, const Matrix& targets, Loss loss,
                     const HiddenMasks* masks = nullptr);
double evaluate_loss(const ForwardPass& pass, const Matrix& targets, Loss loss);

}  // namespace uqlab::nn
