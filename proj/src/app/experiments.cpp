#include "uqlab/app/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>

#include "uqlab/app/csv.hpp"
#include "uqlab/bench/scaling.hpp"
#include "uqlab/data/datasets.hpp"
#include "uqlab/error.hpp"
#include "uqlab/metrics/metrics.hpp"
#include "uqlab/nn/loss.hpp"
#include "uqlab/text.hpp"
#include "uqlab/uq/ensemble.hpp"
#include "uqlab/uq/mc_masks.hpp"
#include "uqlab/uq/stochastic.hpp"

namespace uqlab::app {

namespace {

using nn::Matrix;
using nn::Rng;

// Independent RNG streams per run, all derived from the master seed.
enum Stream : std::uint64_t { kDataStream = 1, kTrainStream = 2, kInitStream = 3, kPredictStream = 4 };

std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::vector<std::string> header_of(std::string_view joined) { return split(joined, kCsvSeparator); }

CsvTable with_header(std::vector<std::string> header) {
  CsvTable t;
  t.header = std::move(header);
  return t;
}

class Run {
 public:
  Run(const ExperimentConfig& cfg, std::ostream* log) : cfg_(cfg), log_(log), stem_(output_stem(cfg)) {}

  void note(const std::string& line) const {
    if (log_) *log_ << "[" << to_string(cfg_.use_case) << "] " << line << std::endl;
  }
  void csv(std::string_view suffix, const CsvTable& table) {
    result_.artifacts.push_back({stem_ + std::string(suffix) + ".csv", emit_csv(table)});
  }
  void metric(std::string key, std::string value) { result_.summary.emplace_back(std::move(key), std::move(value)); }
  void metric(std::string key, double value) { metric(std::move(key), num(value)); }
  void metric(std::string key, std::size_t value) { metric(std::move(key), num(value)); }

  RunResult finish() {
    result_.config = cfg_;
    result_.artifacts.push_back({stem_ + ".summary", format_summary(result_.summary)});
    result_.artifacts.push_back({stem_ + ".config", echo_config(cfg_)});
    return std::move(result_);
  }

  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  ExperimentConfig cfg_;
  std::ostream* log_;
  std::string stem_;
  RunResult result_;
};

nn::TrainConfig train_config(const ExperimentConfig& cfg) {
  nn::TrainConfig t = cfg.train;
  t.seed = Rng::derive(cfg.seed, kTrainStream).next_u64();
  return t;
}

nn::Architecture regression_arch(const ExperimentConfig& cfg, nn::Head head) {
  nn::Architecture a = cfg.model;
  a.inputs = 1;
  a.outputs = 1;
  a.head = head;
  return a;
}

data::LabeledSet toy_data(const ExperimentConfig& cfg) {
  Rng rng = Rng::derive(cfg.seed, kDataStream);
  return data::sample_toy(cfg.data, rng);
}

Matrix eval_grid(const ExperimentConfig& cfg) { return data::linspace(cfg.eval.low, cfg.eval.high, cfg.eval.points); }

std::vector<double> column_values(const Matrix& m) { return {m.values().begin(), m.values().end()}; }

std::vector<double> sqrt_all(const Matrix& m) {
  std::vector<double> out;
  for (double v : m.values()) out.push_back(std::sqrt(v));
  return out;
}

// Points of `x` inside [low, high].
std::vector<std::size_t> inside(const Matrix& x, double low, double high) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < x.rows(); ++i)
    if (x(i, 0) >= low && x(i, 0) <= high) idx.push_back(i);
  return idx;
}

std::vector<double> pick(std::span<const double> values, std::span<const std::size_t> idx) {
  std::vector<double> out;
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::vector<double> sin_of(const Matrix& x) {
  std::vector<double> out;
  for (double v : x.values()) out.push_back(std::sin(v));
  return out;
}

CsvTable curve_table(const Matrix& x, const uq::PredictiveSummary& s) {
  CsvTable t = with_header(header_of(kRegressionHeader));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    t.rows.push_back({num(x(i, 0)), num(s.mean(i, 0)), num(std::sin(x(i, 0))), num(std::sqrt(s.total(i, 0))),
                      num(std::sqrt(s.aleatoric(i, 0))), num(std::sqrt(s.epistemic(i, 0)))});
  }
  return t;
}

// Largest |sigma^2 - (sigma_ale^2 + sigma_epi^2)| over the emitted rows.
double identity_error(const CsvTable& t) {
  const auto sigma = t.numbers("pred_sigma");
  const auto ale = t.numbers("pred_sigma_ale");
  const auto epi = t.numbers("pred_sigma_epi");
  double worst = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    worst = std::max(worst, std::abs(sigma[i] * sigma[i] - (ale[i] * ale[i] + epi[i] * epi[i])));
  return worst;
}

CsvTable train_table(const std::vector<std::vector<double>>& histories) {
  CsvTable t = with_header({"member", "epoch", "loss"});
  for (std::size_t m = 0; m < histories.size(); ++m)
    for (std::size_t e = 0; e < histories[m].size(); ++e) t.rows.push_back({num(m), num(e + 1), num(histories[m][e])});
  return t;
}

CsvTable members_table(const Matrix& x, std::span<const uq::MemberOutput> members) {
  CsvTable t = with_header({"member", "x", "mu", "sigma"});
  for (std::size_t m = 0; m < members.size(); ++m)
    for (std::size_t i = 0; i < x.rows(); ++i)
      t.rows.push_back({num(m), num(x(i, 0)), num(members[m].mean(i, 0)), num(std::sqrt(members[m].variance(i, 0)))});
  return t;
}

uq::DeepEnsemble train_ensemble(Run& run, const data::LabeledSet& set) {
  const ExperimentConfig& cfg = run.cfg();
  run.note("training " + num(cfg.ensemble_members) + " members, " + num(cfg.train.epochs) + " epochs on " +
           num(set.size()) + " points");
  const auto t0 = std::chrono::steady_clock::now();
  uq::DeepEnsemble ens = uq::ensemble_train(set.inputs, set.targets, cfg.ensemble_members, train_config(cfg),
                                            regression_arch(cfg, nn::Head::gaussian));
  run.note("trained in " + num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s");
  return ens;
}

// ---------------------------------------------------------------------------

void regression_baseline(Run& run) {
  const ExperimentConfig& cfg = run.cfg();
  const data::LabeledSet set = toy_data(cfg);
  Rng init = Rng::derive(cfg.seed, kInitStream);
  const nn::Architecture arch = regression_arch(cfg, nn::Head::point);
  run.note("training baseline, " + num(cfg.train.epochs) + " epochs");
  const nn::TrainResult trained = nn::train(nn::make_mlp(arch, init), set.inputs, set.targets, train_config(cfg),
                                            nn::Loss::mse);
  const Matrix x = eval_grid(cfg);
  const Matrix mu = nn::predict(trained.net, x);
  CsvTable t = with_header(header_of(kBaselineHeader));
  for (std::size_t i = 0; i < x.rows(); ++i) t.rows.push_back({num(x(i, 0)), num(mu(i, 0)), num(std::sin(x(i, 0)))});
  run.csv("", t);
  run.csv("-train", train_table({trained.loss_history}));

  const auto pred = column_values(mu);
  const auto truth = sin_of(x);
  const auto id = inside(x, cfg.data.low, cfg.data.high);
  run.metric("grid_points", x.rows());
  run.metric("id_grid_points", id.size());
  run.metric("mae_id", metrics::mae(pick(pred, id), pick(truth, id)));
  run.metric("rmse_id", metrics::rmse(pick(pred, id), pick(truth, id)));
  run.metric("mae_grid", metrics::mae(pred, truth));
  run.metric("final_train_loss", trained.loss_history.back());
}

void regression_ensemble(Run& run, bool decompose) {
  const ExperimentConfig& cfg = run.cfg();
  const data::LabeledSet set = toy_data(cfg);
  const uq::DeepEnsemble ens = train_ensemble(run, set);
  const Matrix x = eval_grid(cfg);
  const std::vector<uq::MemberOutput> members = uq::member_outputs(ens, x);
  const uq::PredictiveSummary s = uq::aggregate(members);
  const CsvTable curve = curve_table(x, s);
  run.csv("", curve);
  run.csv("-members", members_table(x, members));
  run.csv("-train", train_table(ens.loss_histories));

  const auto id = inside(x, cfg.data.low, cfg.data.high);
  const auto xs = column_values(x);
  const auto sigma = sqrt_all(s.total);
  const auto ale = sqrt_all(s.aleatoric);
  const auto epi = sqrt_all(s.epistemic);
  const auto mu = column_values(s.mean);
  const auto truth = sin_of(x);
  const Matrix ends = Matrix::column(std::vector<double>{cfg.data.low, cfg.data.high});
  const uq::PredictiveSummary at_ends = uq::ensemble_predict(ens, ends);

  run.metric("members", ens.size());
  run.metric("grid_points", x.rows());
  run.metric("id_grid_points", id.size());
  run.metric("mae_id", metrics::mae(pick(mu, id), pick(truth, id)));
  run.metric("spearman_sigma_x_id", metrics::spearman(pick(xs, id), pick(sigma, id)));
  run.metric("sigma_ale_at_low", std::sqrt(at_ends.aleatoric(0, 0)));
  run.metric("sigma_ale_at_high", std::sqrt(at_ends.aleatoric(1, 0)));
  run.metric("true_sigma_at_low", data::noise_stddev(cfg.data.low, cfg.data.amplitude));
  run.metric("true_sigma_at_high", data::noise_stddev(cfg.data.high, cfg.data.amplitude));
  run.metric("mean_sigma_ale_id", mean_of(pick(ale, id)));
  run.metric("mean_sigma_epi_id", mean_of(pick(epi, id)));
  run.metric("max_identity_error", identity_error(curve));
  if (decompose) {
    std::vector<uq::MemberOutput> clones(members.size(), members.front());
    const uq::PredictiveSummary dup = uq::aggregate(clones);
    const auto dup_epi = sqrt_all(dup.epistemic);
    run.metric("mean_sigma_ale_grid", mean_of(ale));
    run.metric("mean_sigma_epi_grid", mean_of(epi));
    run.metric("duplicate_members_max_sigma_epi", *std::max_element(dup_epi.begin(), dup_epi.end()));
  }
}

void ood_regression(Run& run) {
  const ExperimentConfig& cfg = run.cfg();
  Rng rng = Rng::derive(cfg.seed, kDataStream);
  const data::RegressionSplit split = data::ood_regression_split(rng, cfg.data, cfg.ood_points);
  const uq::DeepEnsemble ens = train_ensemble(run, split.id);

  const Matrix id_x = data::linspace(cfg.data.low, cfg.data.high, cfg.ood_points);
  const Matrix& ood_x = split.ood.inputs;
  const uq::PredictiveSummary id_s = uq::ensemble_predict(ens, id_x);
  const uq::PredictiveSummary ood_s = uq::ensemble_predict(ens, ood_x);

  // Rows in ascending x: left OOD branch, ID grid, right OOD branch.
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < ood_x.rows(); ++i) (ood_x(i, 0) < cfg.data.low ? left : right).push_back(i);
  CsvTable t = with_header(header_of(kRegressionHeader));
  const CsvTable ood_rows = curve_table(ood_x, ood_s);
  const CsvTable id_rows = curve_table(id_x, id_s);
  for (std::size_t i : left) t.rows.push_back(ood_rows.rows[i]);
  t.rows.insert(t.rows.end(), id_rows.rows.begin(), id_rows.rows.end());
  for (std::size_t i : right) t.rows.push_back(ood_rows.rows[i]);
  run.csv("", t);
  run.csv("-train", train_table(ens.loss_histories));

  const auto ood_epi = sqrt_all(ood_s.epistemic);
  std::vector<double> distance(ood_x.rows());
  for (std::size_t i = 0; i < ood_x.rows(); ++i)
    distance[i] = ood_x(i, 0) < cfg.data.low ? cfg.data.low - ood_x(i, 0) : ood_x(i, 0) - cfg.data.high;

  run.metric("id_points", id_x.rows());
  run.metric("ood_points", ood_x.rows());
  run.metric("id_mae", metrics::mae(column_values(id_s.mean), sin_of(id_x)));
  run.metric("ood_mae", metrics::mae(column_values(ood_s.mean), column_values(split.ood.targets)));
  run.metric("mean_sigma_epi_id", mean_of(sqrt_all(id_s.epistemic)));
  run.metric("mean_sigma_epi_ood", mean_of(ood_epi));
  run.metric("spearman_distance_sigma_epi", metrics::spearman(distance, ood_epi));
  run.metric("spearman_distance_sigma_epi_left", metrics::spearman(pick(distance, left), pick(ood_epi, left)));
  run.metric("spearman_distance_sigma_epi_right", metrics::spearman(pick(distance, right), pick(ood_epi, right)));
  run.metric("max_identity_error", identity_error(t));
}

void bnn_sample(Run& run) {
  const ExperimentConfig& cfg = run.cfg();
  const Matrix x = data::linspace(cfg.bnn.low, cfg.bnn.high, cfg.bnn.points);
  CsvTable samples = with_header({"spec", "sample", "x", "y", "baseline_y"});
  CsvTable moments = with_header({"spec", "x", "baseline_y", "mc_mean", "mc_variance"});
  const std::pair<const char*, uq::StochasticSpec> specs[] = {{"small", cfg.bnn.small}, {"large", cfg.bnn.large}};
  std::uint64_t stream = 0;
  for (const auto& [name, spec] : specs) {
    Rng init = Rng::derive(Rng::derive(cfg.seed, kInitStream).next_u64(), stream);
    Rng draw = Rng::derive(Rng::derive(cfg.seed, kPredictStream).next_u64(), stream);
    ++stream;
    const uq::StochasticNet net = uq::make_stochastic_net(spec, init);
    const Matrix baseline = nn::predict(uq::mean_network(net), x);
    const uq::MonteCarloPrediction mc = uq::stochastic_predict(net, x, cfg.bnn.samples, draw);
    run.note(std::string(name) + ": " + num(net.parameter_count()) + " parameters, " + num(cfg.bnn.samples) +
             " samples");
    for (std::size_t s = 0; s < cfg.bnn.samples; ++s)
      for (std::size_t i = 0; i < x.rows(); ++i)
        samples.rows.push_back({name, num(s), num(x(i, 0)), num(mc.samples(s, i)), num(baseline(i, 0))});
    for (std::size_t i = 0; i < x.rows(); ++i)
      moments.rows.push_back({name, num(x(i, 0)), num(baseline(i, 0)), num(mc.mean(i, 0)), num(mc.variance(i, 0))});
    const std::string p = name;
    run.metric(p + ".depth", spec.depth);
    run.metric(p + ".width", spec.width);
    run.metric(p + ".params", net.parameter_count());
    run.metric(p + ".mean_variance", mean_of(mc.variance.values()));
    double worst = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) worst = std::max(worst, std::abs(mc.mean(i, 0) - baseline(i, 0)));
    run.metric(p + ".max_abs_mean_minus_baseline", worst);
  }
  run.csv("", samples);
  run.csv("-moments", moments);
}

void bnn_scaling(Run& run) {
  const ExperimentConfig& cfg = run.cfg();
  bench::ScalingConfig bc = cfg.bench;
  bc.seed = cfg.seed;
  const auto records = bench::run_scaling(bc, [&run](const bench::ScalingRecord& r) {
    run.note("depth " + num(r.depth) + " width " + num(r.width) + " n " + num(r.n_samples) + ": " +
             (r.truncated() ? std::string(bench::kTimeoutSentinel) : num(*r.median_seconds) + " s"));
  });
  run.metric("cells", records.size());
  run.metric("truncated_cells",
             static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) {
               return r.truncated();
             })));
  std::size_t worst_inversions = 0;
  for (std::size_t d : bc.depths)
    for (std::size_t w : bc.widths) worst_inversions = std::max(worst_inversions, bench::sample_axis_inversions(records, d, w));
  run.metric("max_sample_axis_inversions", worst_inversions);
  for (std::size_t n : bc.sample_counts) {
    if (auto slope = bench::width_slope(records, bc.depths.front(), n))
      run.metric("width_slope.depth" + num(bc.depths.front()) + ".n" + num(n), *slope);
  }
  run.csv("", parse_csv(bench::emit_scaling_report(records, bench::describe(bc))));
}

std::vector<double> row_entropies(const Matrix& probs) {
  std::vector<double> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) out[r] = metrics::entropy(probs.row(r));
  return out;
}

std::vector<double> predictive_entropy(const uq::MonteCarloPrediction& mc, EntropyMode mode) {
  if (mode == EntropyMode::mean) return row_entropies(mc.mean);
  std::vector<double> acc(mc.input_rows, 0.0);
  const std::size_t n = mc.samples.rows();
  for (std::size_t s = 0; s < n; ++s) {
    const auto e = row_entropies(mc.sample(s));
    for (std::size_t r = 0; r < acc.size(); ++r) acc[r] += e[r] / static_cast<double>(n);
  }
  return acc;
}

struct ClassifyData {
  data::LabeledSet train, test;
  Matrix ood;
  std::size_t classes = 0;
};

ClassifyData classify_data(const ExperimentConfig& cfg) {
  const ClassifyConfig& k = cfg.classify;
  ClassifyData d;
  if (k.source == ClassifySource::clusters) {
    data::ClusterConfig cc = data::ClusterConfig::standard(k.shift, k.stddev, k.spacing);
    cc.train_per_class = k.train_per_class;
    cc.test_per_class = k.test_per_class;
    Rng rng = Rng::derive(cfg.seed, kDataStream);
    data::ClusterSplits s = data::sample_clusters(cc, rng);
    d.train = std::move(s.train);
    d.test = std::move(s.test);
    d.ood = std::move(s.ood.inputs);
    d.classes = cc.class_count();
    return d;
  }
  d.train = data::load_idx(k.idx_train_images, k.idx_train_labels);
  d.classes = d.train.targets.cols();
  d.test = data::load_idx(k.idx_test_images, k.idx_test_labels, d.classes);
  const std::string bytes = read_file(k.idx_ood_images);
  d.ood = data::parse_idx_images(
      std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
  if (d.ood.cols() != d.train.inputs.cols() || d.test.inputs.cols() != d.train.inputs.cols())
    throw DataError("IDX image sizes differ between training, test and OOD files");
  return d;
}

void ood_classify(Run& run) {
  const ExperimentConfig& cfg = run.cfg();
  const ClassifyConfig& k = cfg.classify;
  const ClassifyData d = classify_data(cfg);

  nn::Architecture arch = cfg.model;
  arch.inputs = d.train.inputs.cols();
  arch.outputs = d.classes;
  arch.head = nn::Head::categorical;
  nn::TrainConfig tc = cfg.train;
  tc.epochs = k.epochs;
  tc.learning_rate = k.learning_rate;
  tc.batch_size = k.batch_size;
  tc.dropout = k.dropout;
  tc.seed = Rng::derive(cfg.seed, kTrainStream).next_u64();
  Rng init = Rng::derive(cfg.seed, kInitStream);
  run.note("training MC-dropout classifier on " + num(d.train.size()) + " samples, " + num(d.classes) + " classes");
  const nn::TrainResult trained =
      nn::train(nn::make_mlp(arch, init), d.train.inputs, d.train.targets, tc, nn::Loss::cross_entropy);

  Rng draw = Rng::derive(cfg.seed, kPredictStream);
  const uq::MonteCarloPrediction id_mc = uq::mc_dropout_predict(trained.net, d.test.inputs, k.dropout, k.mc_samples, draw);
  const uq::MonteCarloPrediction ood_mc = uq::mc_dropout_predict(trained.net, d.ood, k.dropout, k.mc_samples, draw);
  const auto id_h = predictive_entropy(id_mc, k.entropy);
  const auto ood_h = predictive_entropy(ood_mc, k.entropy);
  const metrics::RocCurve curve = metrics::roc(id_h, ood_h);
  const double max_h = std::log(static_cast<double>(d.classes));

  const auto labels = data::argmax_rows(d.test.targets);
  const auto id_pred = data::argmax_rows(id_mc.mean);
  const auto ood_pred = data::argmax_rows(ood_mc.mean);
  std::vector<double> confidence(labels.size());
  auto correct = std::make_unique<bool[]>(labels.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    confidence[i] = id_mc.mean(i, id_pred[i]);
    correct[i] = id_pred[i] == labels[i];
    hits += correct[i];
  }
  const metrics::ReliabilityReport rel =
      metrics::reliability(confidence, std::span<const bool>(correct.get(), labels.size()), k.reliability_bins);

  CsvTable scores = with_header({"split", "index", "entropy", "confidence", "predicted", "flagged_ood"});
  auto add_scores = [&](const char* split_name, const std::vector<double>& h, const uq::MonteCarloPrediction& mc,
                        const std::vector<std::size_t>& pred) {
    for (std::size_t i = 0; i < h.size(); ++i)
      scores.rows.push_back({split_name, num(i), num(h[i]), num(mc.mean(i, pred[i])), num(pred[i]),
                             h[i] >= curve.youden_threshold ? "1" : "0"});
  };
  add_scores("id", id_h, id_mc, id_pred);
  add_scores("ood", ood_h, ood_mc, ood_pred);
  run.csv("", scores);

  const metrics::Histogram hid = metrics::histogram(id_h, k.histogram_bins, 0.0, max_h);
  const metrics::Histogram hood = metrics::histogram(ood_h, k.histogram_bins, 0.0, max_h);
  CsvTable hist = with_header({"bin_lower", "bin_upper", "id_count", "ood_count"});
  for (std::size_t b = 0; b < k.histogram_bins; ++b)
    hist.rows.push_back({num(hid.bin_lower(b)), num(hid.bin_upper(b)), num(hid.counts[b]), num(hood.counts[b])});
  run.csv("-hist", hist);

  CsvTable roc_t = with_header({"threshold", "fpr", "tpr"});
  for (const auto& p : curve.points) roc_t.rows.push_back({num(p.threshold), num(p.fpr), num(p.tpr)});
  run.csv("-roc", roc_t);

  CsvTable rel_t = with_header({"bin_lower", "bin_upper", "mean_confidence", "accuracy", "count"});
  for (const auto& b : rel.bins)
    rel_t.rows.push_back({num(b.lower), num(b.upper), num(b.mean_confidence), num(b.accuracy), num(b.count)});
  run.csv("-reliability", rel_t);
  run.csv("-train", train_table({trained.loss_history}));

  std::size_t ood_below = 0, id_above = 0;
  for (double h : ood_h) ood_below += h < curve.youden_threshold;
  for (double h : id_h) id_above += h >= curve.youden_threshold;
  const double max_seen = std::max(*std::max_element(id_h.begin(), id_h.end()), *std::max_element(ood_h.begin(), ood_h.end()));

  run.metric("classes", d.classes);
  run.metric("entropy_mode", std::string(to_string(k.entropy)));
  run.metric("id_test_samples", id_h.size());
  run.metric("ood_samples", ood_h.size());
  run.metric("auroc", curve.auroc);
  run.metric("youden_threshold", curve.youden_threshold);
  run.metric("ood_below_threshold_fraction", static_cast<double>(ood_below) / static_cast<double>(ood_h.size()));
  run.metric("id_above_threshold_fraction", static_cast<double>(id_above) / static_cast<double>(id_h.size()));
  run.metric("mean_entropy_id", mean_of(id_h));
  run.metric("mean_entropy_ood", mean_of(ood_h));
  run.metric("max_entropy", max_seen);
  run.metric("entropy_bound", max_h);
  run.metric("id_accuracy", static_cast<double>(hits) / static_cast<double>(labels.size()));
  run.metric("ece", rel.ece);
  run.metric("brier", metrics::brier(id_mc.mean, labels));
}

}  // namespace

const Artifact& RunResult::artifact(std::string_view name) const {
  for (const Artifact& a : artifacts)
    if (a.name == name) return a;
  throw DataError("run produced no artifact '" + std::string(name) + "'");
}

const std::string& RunResult::metric(std::string_view key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw DataError("run summary has no metric '" + std::string(key) + "'");
}

double RunResult::metric_value(std::string_view key) const { return parse_double(metric(key), key); }

std::string output_stem(const ExperimentConfig& cfg) {
  return std::string(to_string(cfg.use_case)) + "-" + std::to_string(cfg.seed);
}

RunResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  ExperimentConfig cfg = config;
  if (cfg.use_case == UseCase::bnn_scaling) bench::apply_budget_override(cfg.bench);
  cfg.validate();
  Run run(cfg, log);
  switch (cfg.use_case) {
    case UseCase::regression_baseline: regression_baseline(run); break;
    case UseCase::regression_ensemble: regression_ensemble(run, false); break;
    case UseCase::decompose: regression_ensemble(run, true); break;
    case UseCase::ood_regression: ood_regression(run); break;
    case UseCase::bnn_sample: bnn_sample(run); break;
    case UseCase::bnn_scaling: bnn_scaling(run); break;
    case UseCase::ood_classify: ood_classify(run); break;
  }
  return run.finish();
}

std::vector<std::filesystem::path> write_artifacts(const RunResult& result) {
  const std::filesystem::path dir(result.config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const Artifact& a : result.artifacts) {
    written.push_back(dir / a.name);
    write_file_atomic(written.back(), a.contents);
  }
  return written;
}

std::string format_summary(const Summary& summary) {
  std::string out;
  for (const auto& [k, v] : summary) out += k + " = " + v + "\n";
  return out;
}

Summary parse_summary(std::string_view text) {
  Summary out;
  for (const std::string& raw : split(text, '\n')) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find(" = ");
    if (eq == std::string_view::npos) throw DataError("summary line without ' = ': '" + std::string(line) + "'");
    out.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 3)));
  }
  return out;
}

}  // namespace uqlab::app
