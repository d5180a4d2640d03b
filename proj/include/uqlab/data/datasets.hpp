#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string_view>
#include <vector>

#include "uqlab/nn/matrix.hpp"
#include "uqlab/nn/rng.hpp"

namespace uqlab::data {

using nn::Matrix;
using nn::Rng;

enum class SplitTag { train, test, id, ood };

std::string_view to_string(SplitTag t);

struct LabeledSet {
  Matrix inputs;
  /// Regression targets, or one-hot class rows. Empty when labels are discarded.
  Matrix targets;
  SplitTag tag = SplitTag::train;

  std::size_t size() const noexcept { return inputs.rows(); }
};

// ---------------------------------------------------------------------------
// Toy heteroscedastic regression: y = sin(x) + eps, eps ~ N(0, sigma(x)^2),
// sigma(x) = amplitude * sigmoid(x).

struct ToyRegressionConfig {
  std::size_t n_points = 1024;
  double low = -std::numbers::pi;
  double high = std::numbers::pi;
  double amplitude = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Standard deviation of the observation noise at x.
double noise_stddev(double x, double amplitude = 0.15);

/// x uniform on [low, high], targets sin(x) plus heteroscedastic noise.
LabeledSet sample_toy(const ToyRegressionConfig& cfg, Rng& rng);
LabeledSet sample_toy(const ToyRegressionConfig& cfg);

/// Evenly spaced column of n points from low to high inclusive.
Matrix linspace(double low, double high, std::size_t n);

struct RegressionSplit {
  LabeledSet id;
  LabeledSet ood;
};

/// ID training data over [-pi, pi] and a noise-free OOD evaluation grid over
/// [-2pi, -pi) u (pi, 2pi] with targets sin(x). The left branch receives
/// ood_points / 2 points, the right branch the rest.
RegressionSplit ood_regression_split(Rng& rng, const ToyRegressionConfig& id_cfg = {},
                                     std::size_t ood_points = 200);

// ---------------------------------------------------------------------------
// Gaussian blobs: the desk-scale stand-in for an image classification ID/OOD
// pair.

struct ClusterConfig {
  std::vector<std::vector<double>> centers;
  std::vector<double> stddevs;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 200;
  std::vector<double> ood_shift;

  std::size_t class_count() const noexcept { return centers.size(); }
  std::size_t dimension() const noexcept { return centers.empty() ? 0 : centers.front().size(); }
  void validate() const;

  /// Four blobs in 2-D on the x axis, `spacing` apart and centred on the
  /// origin; the OOD shift points along +x. Spacing and shift are in multiples
  /// of the blob stddev. With spacing = 2 * shift the three trailing shifted
  /// blobs land halfway between two ID classes.
  static ClusterConfig standard(double shift_in_stddevs = 6.0, double stddev = 1.0,
                                double spacing_in_stddevs = 12.0);
};

struct ClusterSplits {
  LabeledSet train;
  LabeledSet test;
  /// Blobs translated by the shift vector; labels discarded.
  LabeledSet ood;
};

/// Throws ConfigError if the shift is zero (OOD would coincide with ID).
ClusterSplits sample_clusters(const ClusterConfig& cfg, Rng& rng);

/// Index of the largest entry per row.
std::vector<std::size_t> argmax_rows(const Matrix& m);
Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes);

// ---------------------------------------------------------------------------
// IDX binary format (big-endian): magic 0x00000803 for images (count, rows,
// cols) and 0x00000801 for labels (count), followed by unsigned bytes.

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Pixels scaled by 1/255 into one row per image.
Matrix parse_idx_images(std::span<const unsigned char> bytes);
std::vector<std::size_t> parse_idx_labels(std::span<const unsigned char> bytes);

/// Reads an image/label file pair into a set with one-hot targets. The class
/// count is the largest label + 1 unless `classes` is given.
LabeledSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                    std::size_t classes = 0);

std::vector<unsigned char> encode_idx_images(std::span<const unsigned char> pixels, std::uint32_t count,
                                             std::uint32_t rows, std::uint32_t cols);
std::vector<unsigned char> encode_idx_labels(std::span<const unsigned char> labels);

}  // namespace uqlab::data
