#include "uqlab/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uqlab/error.hpp"

namespace uqlab::metrics {

namespace {

void require_equal_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) throw DomainError(std::string(what) + ": empty input");
}

void require_distribution(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("probabilities must be finite and non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw DomainError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double entropy(std::span<const double> probs) {
  if (probs.empty()) throw DomainError("entropy of an empty distribution");
  require_distribution(probs);
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double mae(std::span<const double> pred, std::span<const double> target) {
  require_equal_lengths(pred.size(), target.size(), "mae");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += std::abs(pred[i] - target[i]);
  return total / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> target) {
  require_equal_lengths(pred.size(), target.size(), "rmse");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += (pred[i] - target[i]) * (pred[i] - target[i]);
  return std::sqrt(total / static_cast<double>(pred.size()));
}

double spearman(std::span<const double> a, std::span<const double> b) {
  require_equal_lengths(a.size(), b.size(), "spearman");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

ReliabilityReport reliability(std::span<const double> confidences, std::span<const bool> correct,
                              std::size_t bins) {
  if (bins == 0) throw ConfigError("reliability needs at least one bin");
  require_equal_lengths(confidences.size(), correct.size(), "reliability");
  ReliabilityReport report;
  report.samples = confidences.size();
  report.bins.resize(bins);
  std::vector<double> conf_sum(bins, 0.0), hits(bins, 0.0);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("confidence " + std::to_string(c) + " outside [0, 1]");
    const std::size_t b = std::min(bins - 1, static_cast<std::size_t>(c * static_cast<double>(bins)));
    conf_sum[b] += c;
    hits[b] += correct[i] ? 1.0 : 0.0;
    ++report.bins[b].count;
  }
  const double n = static_cast<double>(confidences.size());
  for (std::size_t b = 0; b < bins; ++b) {
    auto& bin = report.bins[b];
    bin.lower = static_cast<double>(b) / static_cast<double>(bins);
    bin.upper = static_cast<double>(b + 1) / static_cast<double>(bins);
    if (bin.count == 0) continue;
    const double count = static_cast<double>(bin.count);
    bin.mean_confidence = conf_sum[b] / count;
    bin.accuracy = hits[b] / count;
    report.ece += count / n * std::abs(bin.accuracy - bin.mean_confidence);
  }
  return report;
}

double brier(const nn::Matrix& probs, std::span<const std::size_t> labels) {
  require_equal_lengths(probs.rows(), labels.size(), "brier");
  double total = 0.0;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto row = probs.row(r);
    require_distribution(row);
    if (labels[r] >= row.size()) throw DomainError("brier: label outside the class range");
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double target = k == labels[r] ? 1.0 : 0.0;
      total += (row[k] - target) * (row[k] - target);
    }
  }
  return total / static_cast<double>(probs.rows());
}

double Histogram::bin_lower(std::size_t i) const {
  return low + (high - low) * static_cast<double>(i) / static_cast<double>(counts.size());
}

double Histogram::bin_upper(std::size_t i) const {
  return i + 1 == counts.size() ? high : bin_lower(i + 1);
}

Histogram histogram(std::span<const double> values, std::size_t bins, double low, double high) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  if (values.empty()) throw DomainError("histogram of an empty sample");
  if (!(low < high)) throw ConfigError("histogram range must satisfy low < high");
  Histogram h{low, high, std::vector<std::size_t>(bins, 0), 0, 0};
  const double width = (high - low) / static_cast<double>(bins);
  for (double v : values) {
    if (v < low) {
      ++h.below;
    } else if (v > high) {
      ++h.above;
    } else {
      auto b = static_cast<std::size_t>((v - low) / width);
      // Guard the rounding at interior edges as well as the closed top edge.
      while (b > 0 && v < h.bin_lower(b)) --b;
      while (b + 1 < bins && v >= h.bin_lower(b + 1)) ++b;
      ++h.counts[std::min(b, bins - 1)];
    }
  }
  return h;
}

RocCurve roc(std::span<const double> negative_scores, std::span<const double> positive_scores) {
  if (negative_scores.empty() || positive_scores.empty()) throw DomainError("roc needs both score sets non-empty");
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(negative_scores.size() + positive_scores.size());
  for (double s : negative_scores) all.push_back({s, false});
  for (double s : positive_scores) all.push_back({s, true});
  for (const auto& s : all) {
    if (std::isnan(s.score)) throw DomainError("roc: NaN score");
  }
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double n_neg = static_cast<double>(negative_scores.size());
  const double n_pos = static_cast<double>(positive_scores.size());
  RocCurve curve;
  curve.points.push_back(RocPoint{});
  // Area accumulated in count units, divided once at the end.
  double area = 0.0;
  std::size_t tp = 0, fp = 0;
  double best_j = -1.0;
  for (std::size_t i = 0; i < all.size();) {
    const double threshold = all[i].score;
    const std::size_t prev_tp = tp, prev_fp = fp;
    while (i < all.size() && all[i].score == threshold) {
      (all[i].positive ? tp : fp) += 1;
      ++i;
    }
    area += static_cast<double>(fp - prev_fp) * static_cast<double>(tp + prev_tp) / 2.0;
    RocPoint p{threshold, static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos};
    const double j = p.tpr - p.fpr;
    // Thresholds descend, so >= keeps moving to the lowest tied threshold.
    if (j >= best_j) {
      best_j = j;
      curve.youden_threshold = threshold;
    }
    curve.points.push_back(p);
  }
  curve.auroc = area / (n_neg * n_pos);
  return curve;
}

}  // namespace uqlab::metrics
