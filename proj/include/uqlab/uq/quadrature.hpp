#pragma once

#include <cstddef>

#include "uqlab/nn/matrix.hpp"
#include "uqlab/uq/stochastic.hpp"

namespace uqlab::uq {

/// Trapezoid grid per stochastic parameter over mean +- half_width * stddev.
struct QuadratureGrid {
  std::size_t points = 2001;
  double half_width = 10.0;
};

inline constexpr std::size_t kMaxQuadratureWeights = 2;

struct Moments {
  Matrix mean;
  Matrix variance;
};

/// Predictive mean and variance of the network output, integrating over the
/// Gaussian density of its stochastic parameters with the trapezoid rule.
/// Only nets with at most two stochastic parameters (stddev > 0) are
/// tractable here; more raise CapabilityError. The grid must span at least
/// +-6 stddev.
Moments predictive_posterior_quadrature(const StochasticNet& net, const Matrix& inputs,
                                        const QuadratureGrid& grid = {});

}  // namespace uqlab::uq
