#include <cmath>
#include <memory>
#include <numeric>

#include "doctest.h"
#include "uqlab/error.hpp"
#include "uqlab/metrics/metrics.hpp"
#include "uqlab/nn/rng.hpp"

using namespace uqlab;
using namespace uqlab::metrics;
using uqlab::nn::Matrix;
using uqlab::nn::Rng;

namespace {

/// Pairwise Mann-Whitney statistic, ties counted one half.
double brute_force_auc(std::span<const double> neg, std::span<const double> pos) {
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / static_cast<double>(neg.size() * pos.size());
}

std::vector<double> random_distribution(std::size_t k, Rng& rng) {
  std::vector<double> p(k);
  double total = 0.0;
  for (double& v : p) total += (v = rng.uniform() + 1e-3);
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

TEST_CASE("entropy examples") {
  const double one_hot[] = {0.0, 1.0, 0.0};
  CHECK(entropy(one_hot) == 0.0);
  std::vector<double> uniform(10, 0.1);
  CHECK(std::abs(entropy(uniform) - std::log(10.0)) < 1e-12);
  const double half[] = {0.5, 0.5, 0.0};
  CHECK(entropy(half) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const double bad_sum[] = {0.5, 0.6};
  const double negative[] = {1.5, -0.5};
  CHECK_THROWS_AS(entropy(bad_sum), DomainError);
  CHECK_THROWS_AS(entropy(negative), DomainError);
}

TEST_CASE("entropy never exceeds ln K") {
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 2 + rng.uniform_index(20);
    const auto p = random_distribution(k, rng);
    CHECK(entropy(p) <= std::log(static_cast<double>(k)) + 1e-12);
  }
}

TEST_CASE("mae and rmse examples") {
  const double a[] = {1.0, 2.0};
  CHECK(mae(a, a) == 0.0);
  CHECK(rmse(a, a) == 0.0);
  const double pred[] = {0.0, 2.0};
  const double target[] = {1.0, 1.0};
  CHECK(mae(pred, target) == 1.0);
  CHECK(rmse(pred, target) == 1.0);
  const double three[] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(mae(a, three), DimensionError);
}

TEST_CASE("spearman") {
  const double x[] = {1, 2, 3, 4, 5};
  const double up[] = {2, 4, 9, 16, 100};
  const double down[] = {5, 4, 3, 2, 1};
  CHECK(spearman(x, up) == doctest::Approx(1.0));
  CHECK(spearman(x, down) == doctest::Approx(-1.0));
  const double flat[] = {1, 1, 1, 1, 1};
  CHECK(spearman(x, flat) == 0.0);
}

TEST_CASE("reliability examples") {
  std::vector<double> ones(20, 1.0);
  bool all_correct[20];
  std::fill(std::begin(all_correct), std::end(all_correct), true);
  const ReliabilityReport r1 = reliability(ones, all_correct);
  CHECK(r1.ece == 0.0);
  CHECK(r1.bins.size() == kDefaultReliabilityBins);
  CHECK(r1.bins.back().count == 20);

  std::vector<double> conf(10, 0.9);
  bool half[10] = {true, false, true, false, true, false, true, false, true, false};
  const ReliabilityReport r2 = reliability(conf, half, 10);
  CHECK(r2.ece == doctest::Approx(0.4).epsilon(1e-12));
  std::size_t total = 0;
  for (const auto& b : r2.bins) total += b.count;
  CHECK(total == 10);

  CHECK_THROWS_AS(reliability(conf, half, 0), ConfigError);
  const double out_of_range[] = {1.2};
  const bool one[] = {true};
  CHECK_THROWS_AS(reliability(out_of_range, one, 10), DomainError);
}

TEST_CASE("reliability: constructed fixture with matched bins has zero ece") {
  // Bin [0.6, 0.7): confidence 0.65 with 13 of 20 correct.
  std::vector<double> conf(20, 0.65);
  std::unique_ptr<bool[]> correct(new bool[20]);
  for (int i = 0; i < 20; ++i) correct[i] = i < 13;
  CHECK(reliability(conf, std::span<const bool>(correct.get(), 20), 10).ece == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("reliability: simulated perfect calibration") {
  Rng rng(21);
  const std::size_t n = 100000;
  std::vector<double> conf(n);
  std::unique_ptr<bool[]> correct(new bool[n]);
  for (std::size_t i = 0; i < n; ++i) {
    conf[i] = rng.uniform();
    correct[i] = rng.bernoulli(conf[i]);
  }
  CHECK(reliability(conf, std::span<const bool>(correct.get(), n)).ece < 0.02);
}

TEST_CASE("brier examples") {
  const std::size_t label0[] = {0};
  CHECK(brier(Matrix{{1.0, 0.0, 0.0}}, label0) == 0.0);
  CHECK(brier(Matrix{{0.5, 0.5}}, label0) == 0.5);
  for (std::size_t k = 2; k <= 10; ++k) {
    Matrix u(1, k, 1.0 / static_cast<double>(k));
    const double kd = static_cast<double>(k);
    CHECK(brier(u, label0) == doctest::Approx((kd - 1.0) / (kd * kd) + (1.0 - 1.0 / kd) * (1.0 - 1.0 / kd)));
  }
  CHECK_THROWS_AS(brier(Matrix{{0.7, 0.7}}, label0), DomainError);
}

TEST_CASE("histogram conventions") {
  const double single[] = {0.3};
  const Histogram h1 = histogram(single, 4, 0.0, 1.0);
  CHECK(h1.counts == std::vector<std::size_t>{0, 1, 0, 0});

  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(0.005 + 0.01 * i);
  const Histogram h2 = histogram(grid, 5, 0.0, 1.0);
  for (std::size_t c : h2.counts) CHECK(c == 20);

  const double edges[] = {0.0, 0.25, 1.0, -0.1, 1.1};
  const Histogram h3 = histogram(edges, 4, 0.0, 1.0);
  CHECK(h3.counts == std::vector<std::size_t>{1, 1, 0, 1});
  CHECK(h3.below == 1);
  CHECK(h3.above == 1);
  CHECK(h3.bin_upper(3) == 1.0);

  CHECK_THROWS_AS(histogram(std::span<const double>(), 4, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(histogram(single, 0, 0.0, 1.0), ConfigError);
}

TEST_CASE("histogram conserves counts") {
  Rng rng(2);
  std::vector<double> v(1000);
  for (double& x : v) x = rng.normal();
  const Histogram h = histogram(v, 13, -2.0, 2.0);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) + h.below + h.above == v.size());
}

TEST_CASE("roc examples") {
  const double id[] = {0.1, 0.2};
  const double ood[] = {0.8, 0.9};
  const RocCurve perfect = roc(id, ood);
  CHECK(perfect.auroc == 1.0);
  CHECK(perfect.points.front().fpr == 0.0);
  CHECK(perfect.points.front().tpr == 0.0);
  CHECK(perfect.points.back().fpr == 1.0);
  CHECK(perfect.points.back().tpr == 1.0);
  CHECK(perfect.youden_threshold == 0.8);

  const double same[] = {0.3, 0.5, 0.5, 0.9};
  CHECK(roc(same, same).auroc == 0.5);

  CHECK_THROWS_AS(roc(std::span<const double>(), ood), DomainError);
}

TEST_CASE("roc: youden ties resolve to the lowest threshold") {
  // Thresholds 0.9 and 0.5 both reach J = 0.5; 0.5 is kept.
  const double neg[] = {0.2, 0.7};
  const double pos[] = {0.9, 0.5};
  const RocCurve c = roc(neg, pos);
  CHECK(c.youden_threshold == 0.5);
}

TEST_CASE("roc: brute-force Mann-Whitney, invariances, monotone points") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> neg(50), pos(50);
    for (double& v : neg) v = std::round(rng.normal() * 8.0) / 8.0;  // coarse grid forces ties
    for (double& v : pos) v = std::round(rng.normal(0.7, 1.0) * 8.0) / 8.0;
    const RocCurve c = roc(neg, pos);
    CHECK(std::abs(c.auroc - brute_force_auc(neg, pos)) < 1e-12);
    CHECK(std::abs(roc(pos, neg).auroc - (1.0 - c.auroc)) < 1e-12);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
      CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
    }
    // exp is strictly increasing: same curve and area.
    std::vector<double> eneg(neg.size()), epos(pos.size());
    std::transform(neg.begin(), neg.end(), eneg.begin(), [](double v) { return std::exp(v); });
    std::transform(pos.begin(), pos.end(), epos.begin(), [](double v) { return std::exp(v); });
    const RocCurve e = roc(eneg, epos);
    CHECK(e.auroc == c.auroc);
    REQUIRE(e.points.size() == c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      CHECK(e.points[i].fpr == c.points[i].fpr);
      CHECK(e.points[i].tpr == c.points[i].tpr);
    }
  }
}
