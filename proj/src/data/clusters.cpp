#include <algorithm>
#include <cmath>
#include <string>

#include "uqlab/data/datasets.hpp"
#include "uqlab/error.hpp"

namespace uqlab::data {

void ClusterConfig::validate() const {
  if (centers.size() < 2) throw ConfigError("cluster task needs at least 2 classes");
  const std::size_t dim = dimension();
  if (dim == 0) throw ConfigError("cluster centers must be non-empty vectors");
  for (const auto& c : centers) {
    if (c.size() != dim) throw ConfigError("cluster centers differ in dimension");
  }
  if (stddevs.size() != centers.size()) throw ConfigError("need one stddev per class");
  for (double s : stddevs) {
    if (!(s > 0.0)) throw ConfigError("cluster stddevs must be positive");
  }
  if (train_per_class == 0 || test_per_class == 0) throw ConfigError("samples per class must be positive");
  if (ood_shift.size() != dim) throw ConfigError("OOD shift dimension differs from the centers");
  if (std::all_of(ood_shift.begin(), ood_shift.end(), [](double v) { return v == 0.0; })) {
    throw ConfigError("OOD shift is zero: the OOD set would coincide with the ID data");
  }
}

ClusterConfig ClusterConfig::standard(double shift_in_stddevs, double stddev, double spacing_in_stddevs) {
  ClusterConfig cfg;
  const double step = spacing_in_stddevs * stddev;
  for (int k = 0; k < 4; ++k) cfg.centers.push_back({(k - 1.5) * step, 0.0});
  cfg.stddevs.assign(cfg.centers.size(), stddev);
  cfg.ood_shift = {shift_in_stddevs * stddev, 0.0};
  return cfg;
}

std::vector<std::size_t> argmax_rows(const Matrix& m) {
  std::vector<std::size_t> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    out[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes) {
  Matrix m(labels.size(), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) throw DataError("label " + std::to_string(labels[i]) + " exceeds class count");
    m(i, labels[i]) = 1.0;
  }
  return m;
}

namespace {

LabeledSet sample_blobs(const ClusterConfig& cfg, std::size_t per_class, std::span<const double> offset,
                        SplitTag tag, bool keep_labels, Rng& rng) {
  const std::size_t k = cfg.class_count();
  const std::size_t dim = cfg.dimension();
  LabeledSet set{Matrix(k * per_class, dim), keep_labels ? Matrix(k * per_class, k) : Matrix(), tag};
  std::size_t row = 0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      for (std::size_t d = 0; d < dim; ++d) {
        set.inputs(row, d) = rng.normal(cfg.centers[c][d] + offset[d], cfg.stddevs[c]);
      }
      if (keep_labels) set.targets(row, c) = 1.0;
    }
  }
  return set;
}

}  // namespace

ClusterSplits sample_clusters(const ClusterConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::vector<double> zero(cfg.dimension(), 0.0);
  ClusterSplits s;
  s.train = sample_blobs(cfg, cfg.train_per_class, zero, SplitTag::train, true, rng);
  s.test = sample_blobs(cfg, cfg.test_per_class, zero, SplitTag::test, true, rng);
  s.ood = sample_blobs(cfg, cfg.test_per_class, cfg.ood_shift, SplitTag::ood, false, rng);
  return s;
}

}  // namespace uqlab::data
