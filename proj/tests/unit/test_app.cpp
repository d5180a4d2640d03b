#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "uqlab/app/config.hpp"
#include "uqlab/app/csv.hpp"
#include "uqlab/app/experiments.hpp"
#include "uqlab/error.hpp"
#include "uqlab/text.hpp"

using namespace uqlab;
using namespace uqlab::app;

namespace {

// Small settings so every use case runs in well under a second.
ExperimentConfig quick(UseCase u) {
  ExperimentConfig cfg;
  cfg.use_case = u;
  cfg.seed = 7;
  cfg.model.hidden_units = 8;
  cfg.train.epochs = 3;
  cfg.data.n_points = 64;
  cfg.ensemble_members = 3;
  cfg.eval.points = 200;
  cfg.ood_points = 20;
  cfg.bnn.samples = 4;
  cfg.bnn.points = 5;
  cfg.bnn.large.width = 8;
  cfg.bench.depths = {1, 2};
  cfg.bench.widths = {4, 8};
  cfg.bench.sample_counts = {1, 2};
  cfg.bench.repeats = 1;
  cfg.classify.train_per_class = 20;
  cfg.classify.test_per_class = 10;
  cfg.classify.epochs = 3;
  cfg.classify.mc_samples = 4;
  return cfg;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? ";" : "") + cells[i];
  return out;
}

}  // namespace

TEST_CASE("use case names round trip") {
  for (UseCase u : all_use_cases()) CHECK(parse_use_case(to_string(u)) == u);
  CHECK(all_use_cases().size() == 7);
  CHECK_THROWS_AS(parse_use_case("regression"), ConfigError);
}

TEST_CASE("config echo parses back to the same config") {
  ExperimentConfig cfg = quick(UseCase::ood_classify);
  cfg.train.learning_rate = 0.1 + 0.2;
  cfg.eval.low = -2.0 * 3.141592653589793;
  cfg.classify.entropy = EntropyMode::member_average;
  cfg.out_dir = "some dir/out";
  const std::string echo = echo_config(cfg);
  CHECK(echo.rfind("[experiment]\nuse_case = ood-classify\nseed = 7\n", 0) == 0);
  const ExperimentConfig back = parse_config(echo);
  CHECK(echo_config(back) == echo);
  CHECK(back.train.learning_rate == cfg.train.learning_rate);
  CHECK(back.out_dir == "some dir/out");
}

TEST_CASE("config parsing: comments, sections, errors") {
  const ExperimentConfig cfg = parse_config("# note\n[train]\n  epochs = 12 \n; other\n\n[bench]\nwidths = 8, 16\n");
  CHECK(cfg.train.epochs == 12);
  CHECK(cfg.bench.widths == std::vector<std::size_t>{8, 16});
  CHECK_THROWS_AS(parse_config("epochs = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[train]\nepochs 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[train]\nepoch = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[train]\nepochs = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[train\nepochs = 3\n"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[model]\nactivation = swish\n"), doctest::Contains("line 2"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.ensemble_members = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.classify.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.classify.shift = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.classify.source = ClassifySource::idx;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.train.batch_size = cfg.data.n_points + 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("csv emit and strict parse") {
  CsvTable t;
  t.comments = {"made by a test"};
  t.header = {"a", "b"};
  t.rows = {{"1", "2.5"}, {"-3", "inf"}};
  const std::string text = emit_csv(t);
  CHECK(text == "# made by a test\na;b\n1;2.5\n-3;inf\n");
  const CsvTable back = parse_csv(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.numbers("b")[1] == INFINITY);
  CHECK_THROWS_AS(back.column("c"), DataError);

  CHECK_THROWS_AS(parse_csv("a;b\n1;2;\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a;b\n1\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a;b\n1;2"), ParseError);
  CHECK_THROWS_AS(parse_csv("a;b\n\n1;2\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(""), ParseError);
  try {
    parse_csv("a;b\n1;2\n3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 8);
  }
  t.rows.push_back({"x;y", "1"});
  CHECK_THROWS_AS(emit_csv(t), DataError);
  t.rows.back() = {"1"};
  CHECK_THROWS_AS(emit_csv(t), DataError);
}

TEST_CASE("summary format round trip") {
  const Summary s = {{"auroc", "0.75"}, {"small.params", "321"}};
  CHECK(format_summary(s) == "auroc = 0.75\nsmall.params = 321\n");
  CHECK(parse_summary(format_summary(s)) == s);
  CHECK_THROWS_AS(parse_summary("auroc: 1\n"), DataError);
}

TEST_CASE("regression use cases: headers, rows, decomposition identity") {
  const RunResult base = run_experiment(quick(UseCase::regression_baseline));
  const CsvTable b = parse_csv(base.artifact("regression-baseline-7.csv").contents);
  CHECK(join(b.header) == kBaselineHeader);
  CHECK(b.rows.size() == 200);

  for (UseCase u : {UseCase::regression_ensemble, UseCase::decompose}) {
    const RunResult r = run_experiment(quick(u));
    const CsvTable t = parse_csv(r.artifacts.front().contents);
    CHECK(join(t.header) == kRegressionHeader);
    CHECK(t.rows.size() == 200);
    const auto s = t.numbers("pred_sigma"), a = t.numbers("pred_sigma_ale"), e = t.numbers("pred_sigma_epi");
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] * s[i] - a[i] * a[i] - e[i] * e[i]) <= 1e-9);
    CHECK(r.metric_value("max_identity_error") <= 1e-9);
    CHECK(parse_csv(r.artifact(output_stem(r.config) + "-members.csv").contents).rows.size() == 3 * 200);
  }
  const RunResult d = run_experiment(quick(UseCase::decompose));
  CHECK(d.metric_value("duplicate_members_max_sigma_epi") < 1e-6);
}

TEST_CASE("ood-regression emits ascending x over both branches") {
  const RunResult r = run_experiment(quick(UseCase::ood_regression));
  const CsvTable t = parse_csv(r.artifacts.front().contents);
  CHECK(t.rows.size() == 40);
  const auto x = t.numbers("x");
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  CHECK(x.front() < -3.2);
  CHECK(x.back() > 3.2);
  for (const char* key : {"id_mae", "ood_mae", "mean_sigma_epi_id", "mean_sigma_epi_ood",
                          "spearman_distance_sigma_epi_left", "spearman_distance_sigma_epi_right"})
    CHECK(std::isfinite(r.metric_value(key)));
}

TEST_CASE("bnn-sample: baseline constant across samples, stochastic spread") {
  const RunResult r = run_experiment(quick(UseCase::bnn_sample));
  const CsvTable t = parse_csv(r.artifacts.front().contents);
  CHECK(t.rows.size() == 2 * 4 * 5);
  const std::size_t xc = t.column("x"), bc = t.column("baseline_y"), sc = t.column("spec");
  for (const auto& row : t.rows)
    for (const auto& other : t.rows)
      if (row[sc] == other[sc] && row[xc] == other[xc]) CHECK(row[bc] == other[bc]);
  const CsvTable m = parse_csv(r.artifact("bnn-sample-7-moments.csv").contents);
  for (double v : m.numbers("mc_variance")) CHECK(v > 0.0);
  CHECK(r.metric_value("small.params") == 321);
}

TEST_CASE("bnn-scaling report is semicolon CSV with config comments") {
  const RunResult r = run_experiment(quick(UseCase::bnn_scaling));
  const CsvTable t = parse_csv(r.artifacts.front().contents);
  CHECK(!t.comments.empty());
  CHECK(t.rows.size() == 8);
  CHECK(r.metric_value("cells") == 8);
}

TEST_CASE("ood-classify artifacts and entropy bound") {
  const RunResult r = run_experiment(quick(UseCase::ood_classify));
  const CsvTable scores = parse_csv(r.artifacts.front().contents);
  CHECK(scores.rows.size() == 80);
  for (double h : scores.numbers("entropy")) {
    CHECK(h >= 0.0);
    CHECK(h <= std::log(4.0) + 1e-12);
  }
  const CsvTable roc = parse_csv(r.artifact("ood-classify-7-roc.csv").contents);
  CHECK(roc.rows.front()[0] == "inf");
  const CsvTable hist = parse_csv(r.artifact("ood-classify-7-hist.csv").contents);
  double id_total = 0.0;
  for (double c : hist.numbers("id_count")) id_total += c;
  CHECK(id_total == 40);
  CHECK(r.metric_value("auroc") >= 0.0);
  CHECK(r.metric_value("auroc") <= 1.0);
  CHECK(parse_csv(r.artifact("ood-classify-7-reliability.csv").contents).rows.size() == 15);
}

TEST_CASE("re-running an echoed config reproduces every CSV byte for byte") {
  for (UseCase u : {UseCase::regression_ensemble, UseCase::ood_classify, UseCase::bnn_sample}) {
    const RunResult first = run_experiment(quick(u));
    const ExperimentConfig again = parse_config(first.artifact(output_stem(first.config) + ".config").contents);
    const RunResult second = run_experiment(again);
    REQUIRE(first.artifacts.size() == second.artifacts.size());
    for (std::size_t i = 0; i < first.artifacts.size(); ++i) {
      CHECK(first.artifacts[i].name == second.artifacts[i].name);
      CHECK(first.artifacts[i].contents == second.artifacts[i].contents);
    }
  }
}

TEST_CASE("write_artifacts writes every file and no temporaries") {
  const auto dir = std::filesystem::temp_directory_path() / "uqlab-test-app";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg = quick(UseCase::regression_baseline);
  cfg.out_dir = (dir / "nested").string();
  const RunResult r = run_experiment(cfg);
  const auto paths = write_artifacts(r);
  CHECK(paths.size() == r.artifacts.size());
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "nested")) {
    ++files;
    CHECK(entry.path().string().find(".tmp.") == std::string::npos);
  }
  CHECK(files == r.artifacts.size());
  CHECK(read_file(paths.front()) == r.artifacts.front().contents);
  std::filesystem::remove_all(dir);
}
