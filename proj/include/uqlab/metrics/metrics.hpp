#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "uqlab/nn/matrix.hpp"

namespace uqlab::metrics {

/// Shannon entropy in nats with 0 ln 0 = 0. The input must be a probability
/// vector (non-negative, summing to 1 within 1e-6).
double entropy(std::span<const double> probs);

double mae(std::span<const double> pred, std::span<const double> target);
double rmse(std::span<const double> pred, std::span<const double> target);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

// Calibration ----------------------------------------------------------------

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

struct ReliabilityReport {
  std::vector<ReliabilityBin> bins;
  double ece = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultReliabilityBins = 15;

/// Equal-width confidence bins on [0, 1]; a confidence of exactly 1 falls in
/// the last bin. ece = sum over non-empty bins of (count / n) |acc - conf|.
ReliabilityReport reliability(std::span<const double> confidences, std::span<const bool> correct,
                              std::size_t bins = kDefaultReliabilityBins);

/// Mean over rows of sum_k (p_k - onehot_k)^2.
double brier(const nn::Matrix& probs, std::span<const std::size_t> labels);

// Histograms -----------------------------------------------------------------

struct Histogram {
  double low = 0.0;
  double high = 0.0;
  std::vector<std::size_t> counts;
  std::size_t below = 0;
  std::size_t above = 0;

  double bin_lower(std::size_t i) const;
  double bin_upper(std::size_t i) const;
};

/// Bins are half-open [lo, hi) except the last, which is closed.
Histogram histogram(std::span<const double> values, std::size_t bins, double low, double high);

// ROC ------------------------------------------------------------------------

struct RocPoint {
  /// Scores >= threshold are flagged positive (OOD).
  double threshold = std::numeric_limits<double>::infinity();
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auroc = 0.0;
  double youden_threshold = 0.0;
};

/// Threshold sweep over the distinct scores (higher score = more OOD).
/// Starts at (0,0), ends at (1,1); auroc is the trapezoid area, which counts
/// ties as one half. Youden ties resolve to the lowest threshold.
RocCurve roc(std::span<const double> negative_scores, std::span<const double> positive_scores);

}  // namespace uqlab::metrics
