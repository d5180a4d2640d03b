// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Experiments run through the uqlab
// executable with the reference seed (0) and default settings.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "uqlab/app/config.hpp"
#include "uqlab/app/csv.hpp"
#include "uqlab/app/experiments.hpp"
#include "uqlab/bench/scaling.hpp"
#include "uqlab/data/datasets.hpp"
#include "uqlab/error.hpp"
#include "uqlab/metrics/metrics.hpp"
#include "uqlab/nn/gradients.hpp"
#include "uqlab/nn/loss.hpp"
#include "uqlab/nn/mlp.hpp"
#include "uqlab/nn/rng.hpp"
#include "uqlab/text.hpp"
#include "uqlab/uq/ensemble.hpp"
#include "uqlab/uq/quadrature.hpp"
#include "uqlab/uq/stochastic.hpp"

namespace fs = std::filesystem;
using namespace uqlab;
using nn::Matrix;
using nn::Rng;
using Clock = std::chrono::steady_clock;

namespace {

// Budget per scaling cell for the sweep run here; the default of 30 s would
// make the full sweep take far longer than a test run should.
constexpr const char* kScalingBudget = "1";

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    notes.push_back(std::string(ok ? "" : "NOT ") + what);
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

struct CliRun {
  int exit_code = -1;
  double seconds = 0.0;
};

CliRun run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("'") + UQLAB_CLI + "' " + args + " >>'" + log.string() + "' 2>&1";
  const auto t0 = Clock::now();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, seconds_since(t0)};
}

app::Summary read_summary(const fs::path& p) { return app::parse_summary(app::read_file(p)); }

double metric(const app::Summary& s, const std::string& key) {
  for (const auto& [k, v] : s)
    if (k == key) return parse_double(v, key);
  throw DataError("summary has no '" + key + "'");
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? ";" : "") + cells[i];
  return out;
}

// ---------------------------------------------------------------------------

Verdict gradient_check() {
  const auto t0 = Clock::now();
  Rng rng(101);
  const nn::Activation acts[] = {nn::Activation::tanh, nn::Activation::sigmoid, nn::Activation::relu,
                                 nn::Activation::identity};
  double worst = 0.0;
  int nets = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const bool nll = trial % 2 == 1;
    nn::Architecture arch;
    arch.inputs = 1 + rng.uniform_index(3);
    arch.hidden_layers = 1 + rng.uniform_index(3);
    arch.hidden_units = 1 + rng.uniform_index(8);
    arch.activation = acts[(trial / 2) % 4];
    arch.outputs = 1 + rng.uniform_index(2);
    arch.head = nll ? nn::Head::gaussian : nn::Head::point;
    nn::Mlp net = nn::make_mlp(arch, rng);
    // Glorot weights plus a perturbation so biases are non-zero.
    std::vector<double> theta = net.parameters();
    for (double& t : theta) t += rng.normal(0.0, 0.3);
    net.set_parameters(theta);
    const std::size_t n = 1 + rng.uniform_index(5);
    Matrix x(n, arch.inputs), y(n, arch.outputs);
    for (double& v : x.values()) v = rng.normal();
    for (double& v : y.values()) v = rng.normal();
    const nn::Loss loss = nll ? nn::Loss::gaussian_nll : nn::Loss::mse;
    const auto analytic = nn::value_and_gradients(net, x, y, loss).gradients;
    const auto numeric = nn::finite_diff_grad(net, x, y, loss);
    worst = std::max(worst, nn::max_relative_error(analytic, numeric));
    ++nets;
  }
  const double t = seconds_since(t0);
  Verdict v;
  v.require(nets >= 100, std::to_string(nets) + " nets (mse and gaussian nll)");
  v.require(worst < 1e-4, "max relative error " + fmt(worst) + " < 1e-4");
  v.require(t < 30.0, "runtime " + fmt(t) + " s < 30 s");
  return v;
}

Verdict noise_law() {
  const auto t0 = Clock::now();
  data::ToyRegressionConfig cfg;
  cfg.n_points = 100000;
  Rng rng(2);
  const data::LabeledSet set = data::sample_toy(cfg, rng);
  constexpr std::size_t kBins = 10;
  std::vector<double> sq(kBins, 0.0), expected(kBins, 0.0);
  std::vector<std::size_t> count(kBins, 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double x = set.inputs(i, 0);
    const std::size_t b = std::min(kBins - 1, static_cast<std::size_t>((x - cfg.low) / (cfg.high - cfg.low) * kBins));
    const double r = set.targets(i, 0) - std::sin(x);
    const double s = 0.15 / (1.0 + std::exp(-x));
    sq[b] += r * r;
    expected[b] += s * s;
    ++count[b];
  }
  double worst = 0.0;
  for (std::size_t b = 0; b < kBins; ++b) {
    // The residual mean is 0 by construction, so the binned stddev is the RMS
    // residual; its target is the RMS of 0.15 sigmoid(x) over the bin's points.
    const double measured = std::sqrt(sq[b] / static_cast<double>(count[b]));
    const double truth = std::sqrt(expected[b] / static_cast<double>(count[b]));
    worst = std::max(worst, std::abs(measured / truth - 1.0));
  }
  const double t = seconds_since(t0);
  Verdict v;
  v.require(worst < 0.10, "worst bin relative deviation " + fmt(worst) + " < 10%");
  v.require(t < 5.0, "runtime " + fmt(t) + " s < 5 s");
  return v;
}

Verdict regression_figure(const fs::path& dir, double seconds) {
  Verdict v;
  const app::CsvTable base = app::parse_csv(app::read_file(dir / "regression-baseline-0.csv"));
  v.require(join(base.header) == app::kBaselineHeader, "baseline header is x;pred_mu;true_mu (no sigma columns)");
  const app::Summary bs = read_summary(dir / "regression-baseline-0.summary");
  v.require(metric(bs, "mae_id") < 0.15, "baseline mae vs sin on [-pi, pi] " + fmt(metric(bs, "mae_id")) + " < 0.15");

  const app::CsvTable ens = app::parse_csv(app::read_file(dir / "regression-ensemble-0.csv"));
  v.require(join(ens.header) == app::kRegressionHeader, "ensemble header carries the sigma columns");
  const auto x = ens.numbers("x");
  const auto sigma = ens.numbers("pred_sigma");
  std::vector<double> xs, ss;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= -std::numbers::pi && x[i] <= std::numbers::pi) {
      xs.push_back(x[i]);
      ss.push_back(sigma[i]);
    }
  }
  const double rho = metrics::spearman(xs, ss);
  v.require(rho > 0.8, "Spearman(total sigma, x) on " + std::to_string(xs.size()) + " grid points " + fmt(rho) +
                           " > 0.8");
  v.require(seconds < 120.0, "training + eval " + fmt(seconds) + " s < 120 s");
  return v;
}

Verdict decomposition(const fs::path& dir) {
  Verdict v;
  const app::CsvTable t = app::parse_csv(app::read_file(dir / "decompose-0.csv"));
  const auto s = t.numbers("pred_sigma"), a = t.numbers("pred_sigma_ale"), e = t.numbers("pred_sigma_epi");
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s[i] * s[i] - a[i] * a[i] - e[i] * e[i]));
  v.require(worst <= 1e-9, "per-row identity error " + fmt(worst) + " <= 1e-9 over " + std::to_string(s.size()) + " rows");
  const app::Summary sum = read_summary(dir / "decompose-0.summary");
  const double lo = metric(sum, "sigma_ale_at_low"), hi = metric(sum, "sigma_ale_at_high");
  v.require(hi > lo, "aleatoric sigma(pi) " + fmt(hi) + " > sigma(-pi) " + fmt(lo));

  // Duplicated members, checked independently of the CLI: five copies of one
  // member's heads.
  Rng rng(5);
  std::vector<uq::MemberOutput> clones;
  uq::MemberOutput m{Matrix(50, 1), Matrix(50, 1)};
  for (double& val : m.mean.values()) val = rng.normal(0.0, 3.0);
  for (double& val : m.variance.values()) val = rng.uniform(0.01, 1.0);
  clones.assign(5, m);
  const uq::PredictiveSummary dup = uq::aggregate(clones);
  double max_epi = 0.0;
  for (double val : dup.epistemic.values()) max_epi = std::max(max_epi, std::sqrt(val));
  const double cli_epi = metric(sum, "duplicate_members_max_sigma_epi");
  v.require(max_epi < 1e-6 && cli_epi < 1e-6,
            "duplicated members sigma_epi " + fmt(std::max(max_epi, cli_epi)) + " < 1e-6");
  return v;
}

uq::StochasticNet single_weight_net(double m, double s, bool hidden) {
  using uq::GaussianWeightLayer;
  if (!hidden) {
    return uq::StochasticNet({GaussianWeightLayer{Matrix{{m}}, Matrix{{s}}, {0.0}, {0.0}, nn::Activation::identity}});
  }
  // y = 1.5 tanh(w x + 0.2) - 0.1 with w ~ N(m, s^2); every other parameter fixed.
  return uq::StochasticNet({
      GaussianWeightLayer{Matrix{{m}}, Matrix{{s}}, {0.2}, {0.0}, nn::Activation::tanh},
      GaussianWeightLayer{Matrix{{1.5}}, Matrix{{0.0}}, {-0.1}, {0.0}, nn::Activation::identity},
  });
}

Verdict quadrature_oracle() {
  Verdict v;
  const Matrix x{{0.8}};
  const uq::StochasticNet net = single_weight_net(0.6, 0.9, true);
  const uq::Moments q = uq::predictive_posterior_quadrature(net, x);
  Rng rng(17);
  const uq::MonteCarloPrediction mc = uq::stochastic_predict(net, x, 100000, rng);
  const double se = std::sqrt(mc.variance(0, 0) / 100000.0);
  const double gap = std::abs(mc.mean(0, 0) - q.mean(0, 0));
  v.require(gap <= 3.0 * se, "tanh net: |MC mean - quadrature| " + fmt(gap) + " <= 3 SE " + fmt(3.0 * se));

  double worst = 0.0;
  for (const auto& [m, s, c] : {std::tuple{0.6, 0.9, 0.8}, std::tuple{-1.3, 0.25, 2.0}, std::tuple{2.0, 1.5, -0.7}}) {
    const uq::Moments lin = uq::predictive_posterior_quadrature(single_weight_net(m, s, false), Matrix{{c}});
    worst = std::max({worst, std::abs(lin.mean(0, 0) - m * c), std::abs(lin.variance(0, 0) - s * s * c * c)});
  }
  v.require(worst <= 1e-9, "linear case (m c, s^2 c^2) max error " + fmt(worst) + " <= 1e-9");
  return v;
}

Verdict scaling(const fs::path& dir, double seconds) {
  Verdict v;
  const auto records = bench::parse_scaling_report(app::read_file(dir / "bnn-scaling-0.csv"));
  const bench::ScalingConfig defaults;
  const std::size_t cells = defaults.depths.size() * defaults.widths.size() * defaults.sample_counts.size();
  v.require(records.size() == cells, "full default sweep: " + std::to_string(records.size()) + " of " +
                                         std::to_string(cells) + " cells reported");
  std::size_t worst = 0;
  for (std::size_t d : defaults.depths)
    for (std::size_t w : defaults.widths) worst = std::max(worst, bench::sample_axis_inversions(records, d, w));
  v.require(worst <= 1, "worst sample-axis inversions per line " + std::to_string(worst) + " <= 1");
  std::optional<double> slope;
  std::string line;
  for (std::size_t d : defaults.depths) {
    for (std::size_t n : defaults.sample_counts) {
      if ((slope = bench::width_slope(records, d, n))) {
        line = "depth " + std::to_string(d) + ", n " + std::to_string(n);
        break;
      }
    }
    if (slope) break;
  }
  v.require(slope && *slope > 1.2, "log-log width slope over the largest three widths" +
                                       (slope ? " (" + line + ") " + fmt(*slope) : std::string(" unavailable")) +
                                       " > 1.2");
  const double budget = std::atof(kScalingBudget);
  v.require(seconds <= budget * static_cast<double>(cells) + 60.0,
            "sweep took " + fmt(seconds) + " s, bounded by " + std::to_string(cells) + " cells x " + kScalingBudget +
                " s budget");
  return v;
}

Verdict regression_ood(const fs::path& dir, double seconds) {
  Verdict v;
  const app::Summary s = read_summary(dir / "ood-regression-0.summary");
  const double epi_id = metric(s, "mean_sigma_epi_id"), epi_ood = metric(s, "mean_sigma_epi_ood");
  v.require(epi_ood > epi_id, "mean sigma_epi OOD " + fmt(epi_ood) + " > ID " + fmt(epi_id));
  const double mae_id = metric(s, "id_mae"), mae_ood = metric(s, "ood_mae");
  v.require(mae_ood > mae_id, "OOD mae " + fmt(mae_ood) + " > ID mae " + fmt(mae_id));
  const double left = metric(s, "spearman_distance_sigma_epi_left");
  const double right = metric(s, "spearman_distance_sigma_epi_right");
  v.require(left > 0.8 && right > 0.8,
            "distance-sigma_epi Spearman left " + fmt(left) + ", right " + fmt(right) + " > 0.8");
  v.require(seconds < 120.0, "runtime " + fmt(seconds) + " s < 120 s");
  return v;
}

Verdict classification_ood(const fs::path& dir, double seconds) {
  Verdict v;
  const app::Summary wide = read_summary(dir / "ood-classify-0.summary");
  const app::Summary narrow = read_summary(dir / "shift1" / "ood-classify-0.summary");
  const double a6 = metric(wide, "auroc"), a1 = metric(narrow, "auroc");
  v.require(a6 > 0.95, "6 sigma shift entropy AUROC " + fmt(a6) + " > 0.95");
  v.require(a1 > 0.5 && a1 < a6, "1 sigma shift AUROC " + fmt(a1) + " strictly between 0.5 and " + fmt(a6));
  v.require(metric(narrow, "ood_below_threshold_fraction") > 0.0,
            "1 sigma shift: " + fmt(metric(narrow, "ood_below_threshold_fraction")) +
                " of OOD samples fall below the threshold");
  v.require(seconds < 60.0, "runtime " + fmt(seconds) + " s < 60 s");
  return v;
}

Verdict metric_oracles() {
  Verdict v;
  Rng rng(33);
  std::vector<double> neg(50), pos(50);
  // Coarse rounding forces ties, which the pairwise count scores as 1/2.
  for (double& s : neg) s = std::round(rng.normal() * 4.0) / 4.0;
  for (double& s : pos) s = std::round(rng.normal(0.7, 1.0) * 4.0) / 4.0;
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  const double brute = wins / (50.0 * 50.0);
  const double auroc = metrics::roc(neg, pos).auroc;
  v.require(std::abs(auroc - brute) <= 1e-12, "auroc " + fmt(auroc) + " equals pairwise Mann-Whitney " + fmt(brute));

  const std::vector<double> uniform(10, 0.1);
  const double h = metrics::entropy(uniform);
  v.require(std::abs(h - std::log(10.0)) <= 1e-12, "entropy(uniform 10) = ln 10 to 1e-12");

  constexpr std::size_t n = 100000;
  std::vector<double> conf(n);
  auto correct = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) {
    conf[i] = rng.uniform(0.25, 1.0);
    correct[i] = rng.bernoulli(conf[i]);
  }
  const double ece = metrics::reliability(conf, std::span<const bool>(correct.get(), n)).ece;
  v.require(ece < 0.02, "perfectly calibrated simulation ECE " + fmt(ece) + " < 0.02");
  return v;
}

Verdict reproducibility(const fs::path& first, const fs::path& second, const fs::path& log) {
  Verdict v;
  std::size_t parsed = 0, compared = 0;
  bool all_parse = true, identical = true, runs_ok = true;
  std::vector<fs::path> configs;
  for (const auto& entry : fs::recursive_directory_iterator(first)) {
    if (entry.path().extension() == ".csv") {
      try {
        app::parse_csv(app::read_file(entry.path()));
        ++parsed;
      } catch (const Error& e) {
        all_parse = false;
        v.notes.push_back(entry.path().filename().string() + ": " + e.what());
      }
    }
    if (entry.path().extension() == ".config") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  for (const fs::path& cfg : configs) {
    const fs::path out = second / fs::relative(cfg.parent_path(), first);
    if (run_cli("-q --config '" + cfg.string() + "' --out-dir '" + out.string() + "'", log).exit_code != 0) {
      runs_ok = false;
      continue;
    }
    const std::string stem = cfg.stem().string();
    for (const auto& entry : fs::directory_iterator(cfg.parent_path())) {
      const std::string name = entry.path().filename().string();
      if (entry.path().extension() != ".csv" || !name.starts_with(stem)) continue;
      const std::string a = app::read_file(entry.path()), b = app::read_file(out / name);
      if (stem.starts_with("bnn-scaling")) {
        // Timings differ between runs; the cell grid must not.
        auto grid = [](const std::string& text) {
          std::vector<std::string> cells;
          for (const auto& r : bench::parse_scaling_report(text))
            cells.push_back(std::to_string(r.depth) + "/" + std::to_string(r.width) + "/" +
                            std::to_string(r.n_samples) + "/" + std::to_string(r.params));
          return cells;
        };
        if (grid(a) != grid(b)) identical = false;
      } else {
        ++compared;
        if (a != b) {
          identical = false;
          v.notes.push_back(name + " differs on re-run");
        }
      }
    }
  }
  v.require(runs_ok, std::to_string(configs.size()) + " emitted configs re-run");
  v.require(identical, std::to_string(compared) + " CSVs byte-identical on re-run (scaling: identical cell grid)");
  v.require(all_parse && parsed > 0, std::to_string(parsed) + " CSVs parse as semicolon CSV with header first");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "uqlab-acceptance";
  fs::remove_all(root);
  const fs::path first = root / "first", second = root / "second", log = root / "cli.log";
  fs::create_directories(first);

  std::map<std::string, double> took;
  bool cli_ok = true;
  auto cli = [&](const std::string& name, const std::string& args) {
    const CliRun r = run_cli(args, log);
    took[name] = r.seconds;
    if (r.exit_code != 0) {
      cli_ok = false;
      std::cout << "uqlab " << args << " exited with " << r.exit_code << " (see " << log.string() << ")\n";
    }
  };
  const std::string out = " -q --seed 0 --out-dir '" + first.string() + "'";
  cli("baseline", "regression-baseline" + out);
  cli("ensemble", "regression-ensemble" + out);
  cli("decompose", "decompose" + out);
  cli("ood-regression", "ood-regression" + out);
  cli("classify6", "ood-classify" + out);
  cli("classify1", "ood-classify -q --seed 0 --classify.shift 1 --out-dir '" + (first / "shift1").string() + "'");
  cli("bnn-sample", "bnn-sample" + out);
  ::setenv(bench::kBudgetEnvVar, kScalingBudget, 1);
  cli("scaling", "bnn-scaling" + out);

  struct Criterion {
    int id;
    std::string title;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", gradient_check},
      {2, "heteroscedastic noise law", noise_law},
      {3, "baseline vs ensemble uncertainty curve",
       [&] { return regression_figure(first, took["baseline"] + took["ensemble"]); }},
      {4, "aleatoric/epistemic decomposition", [&] { return decomposition(first); }},
      {5, "quadrature oracle agreement", quadrature_oracle},
      {6, "prediction cost scaling", [&] { return scaling(first, took["scaling"]); }},
      {7, "regression OOD", [&] { return regression_ood(first, took["ood-regression"]); }},
      {8, "classification OOD", [&] { return classification_ood(first, took["classify6"] + took["classify1"]); }},
      {9, "metric oracles", metric_oracles},
      {10, "reproducibility and CSV format", [&] { return reproducibility(first, second, log); }},
  };

  int failures = cli_ok ? 0 : 1;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.require(false, std::string("error: ") + e.what());
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "):";
    for (std::size_t i = 0; i < v.notes.size(); ++i) std::cout << (i ? "; " : " ") << v.notes[i];
    std::cout << std::endl;
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
