#include "uqlab/bench/scaling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "uqlab/error.hpp"
#include "uqlab/text.hpp"
#include "uqlab/uq/stochastic.hpp"

namespace uqlab::bench {

namespace {

void require_increasing(const std::vector<std::size_t>& v, const char* name) {
  if (v.empty()) throw ConfigError(std::string(name) + " list is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) throw ConfigError(std::string(name) + " entries must be positive");
    if (i > 0 && v[i] <= v[i - 1]) throw ConfigError(std::string(name) + " list must be strictly increasing");
  }
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

struct Cell {
  std::size_t depth, width, n_samples;
};

bool dominated(const std::vector<Cell>& truncated, const Cell& c) {
  return std::any_of(truncated.begin(), truncated.end(), [&c](const Cell& t) {
    return t.depth <= c.depth && t.width <= c.width && t.n_samples <= c.n_samples;
  });
}

}  // namespace

void ScalingConfig::validate() const {
  require_increasing(depths, "depth");
  require_increasing(widths, "width");
  require_increasing(sample_counts, "sample-count");
  if (repeats == 0) throw ConfigError("repeats must be positive");
  if (!(budget_seconds > 0.0)) throw ConfigError("time budget must be positive");
  if (input_dim == 0 || output_dim == 0 || batch_rows == 0) throw ConfigError("bench dimensions must be positive");
  if (!(weight_stddev > 0.0)) throw ConfigError("weight stddev must be positive");
}

void apply_budget_override(ScalingConfig& cfg) {
  if (const char* value = std::getenv(kBudgetEnvVar); value && *value) {
    cfg.budget_seconds = parse_double(value, kBudgetEnvVar);
    if (!(cfg.budget_seconds > 0.0)) throw ConfigError(std::string(kBudgetEnvVar) + " must be positive");
  }
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<ScalingRecord> run_scaling(const ScalingConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  const auto budget = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(cfg.budget_seconds));

  std::vector<ScalingRecord> records;
  std::vector<Cell> truncated;
  nn::Rng data_rng = nn::Rng::derive(cfg.seed, 0);
  nn::Matrix inputs(cfg.batch_rows, cfg.input_dim);
  for (double& v : inputs.values()) v = data_rng.normal();

  std::uint64_t cell_index = 0;
  for (std::size_t depth : cfg.depths) {
    for (std::size_t width : cfg.widths) {
      const uq::StochasticSpec spec{cfg.input_dim, depth, width, cfg.output_dim, nn::Activation::tanh,
                                    cfg.weight_stddev};
      const std::size_t params = uq::dense_parameter_count(spec);
      std::optional<uq::StochasticNet> net;
      for (std::size_t n_samples : cfg.sample_counts) {
        ++cell_index;
        ScalingRecord rec{depth, width, n_samples, params, {}, std::nullopt};
        const Cell cell{depth, width, n_samples};
        if (params > cfg.max_parameters || dominated(truncated, cell)) {
          truncated.push_back(cell);
          if (progress) progress(rec);
          records.push_back(std::move(rec));
          continue;
        }
        if (!net) {
          nn::Rng build_rng = nn::Rng::derive(cfg.seed, 0x100000000ULL + depth * 65536 + width);
          net = uq::make_stochastic_net(spec, build_rng);
        }
        nn::Rng sample_rng = nn::Rng::derive(cfg.seed, cell_index);
        const auto deadline = clock::now() + budget;
        bool out_of_budget = uq::stochastic_predict(*net, inputs, 1, sample_rng, deadline).truncated;
        for (std::size_t r = 0; r < cfg.repeats && !out_of_budget; ++r) {
          const auto start = clock::now();
          const auto result = uq::stochastic_predict(*net, inputs, n_samples, sample_rng, deadline);
          const auto stop = clock::now();
          if (result.truncated) {
            out_of_budget = true;
          } else {
            rec.repeat_seconds.push_back(std::chrono::duration<double>(stop - start).count());
          }
        }
        if (out_of_budget) {
          truncated.push_back(cell);
        } else {
          rec.median_seconds = median(rec.repeat_seconds);
        }
        if (progress) progress(rec);
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

std::vector<std::string> describe(const ScalingConfig& cfg) {
  return {
      "depths = " + join_sizes(cfg.depths),
      "widths = " + join_sizes(cfg.widths),
      "sample_counts = " + join_sizes(cfg.sample_counts),
      "repeats = " + std::to_string(cfg.repeats),
      "seed = " + std::to_string(cfg.seed),
      "budget_seconds = " + format_double(cfg.budget_seconds),
      "max_parameters = " + std::to_string(cfg.max_parameters),
      "input_dim = " + std::to_string(cfg.input_dim),
      "output_dim = " + std::to_string(cfg.output_dim),
      "batch_rows = " + std::to_string(cfg.batch_rows),
      "weight_stddev = " + format_double(cfg.weight_stddev),
  };
}

std::string emit_scaling_report(std::span<const ScalingRecord> records, std::span<const std::string> comments) {
  if (records.empty()) throw DomainError("scaling report needs at least one record");
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  out << kScalingHeader << '\n';
  for (const auto& r : records) {
    out << r.depth << ';' << r.width << ';' << r.n_samples << ';' << r.params << ';'
        << (r.median_seconds ? format_double(*r.median_seconds) : std::string(kTimeoutSentinel)) << ';';
    if (r.repeat_seconds.empty()) out << kNoRepeats;
    for (std::size_t i = 0; i < r.repeat_seconds.size(); ++i) out << (i ? "|" : "") << format_double(r.repeat_seconds[i]);
    out << '\n';
  }
  return out.str();
}

std::vector<ScalingRecord> parse_scaling_report(std::string_view text) {
  std::vector<ScalingRecord> records;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kScalingHeader) throw DataError("scaling report: unexpected header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ';');
    if (fields.size() != 6) {
      throw DataError("scaling report line " + std::to_string(line_no) + ": expected 6 fields");
    }
    ScalingRecord r;
    r.depth = parse_unsigned(fields[0], "depth");
    r.width = parse_unsigned(fields[1], "width");
    r.n_samples = parse_unsigned(fields[2], "n_samples");
    r.params = parse_unsigned(fields[3], "params");
    if (fields[4] != kTimeoutSentinel) r.median_seconds = parse_double(fields[4], "median_seconds");
    if (fields[5] != kNoRepeats) {
      for (const auto& t : split(fields[5], '|')) r.repeat_seconds.push_back(parse_double(t, "repeat time"));
    }
    records.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("scaling report: missing header");
  return records;
}

std::size_t sample_axis_inversions(std::span<const ScalingRecord> records, std::size_t depth, std::size_t width) {
  std::vector<const ScalingRecord*> line;
  for (const auto& r : records) {
    if (r.depth == depth && r.width == width && !r.truncated()) line.push_back(&r);
  }
  std::sort(line.begin(), line.end(), [](auto* a, auto* b) { return a->n_samples < b->n_samples; });
  std::size_t inversions = 0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    if (*line[i]->median_seconds < *line[i - 1]->median_seconds) ++inversions;
  }
  return inversions;
}

std::optional<double> width_slope(std::span<const ScalingRecord> records, std::size_t depth, std::size_t n_samples,
                                  std::size_t tail) {
  std::vector<const ScalingRecord*> line;
  for (const auto& r : records) {
    if (r.depth == depth && r.n_samples == n_samples) line.push_back(&r);
  }
  std::sort(line.begin(), line.end(), [](auto* a, auto* b) { return a->width < b->width; });
  if (line.size() < tail || tail < 2) return std::nullopt;
  line.erase(line.begin(), line.end() - static_cast<std::ptrdiff_t>(tail));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto* r : line) {
    if (r->truncated() || *r->median_seconds <= 0.0) return std::nullopt;
    const double x = std::log(static_cast<double>(r->width));
    const double y = std::log(*r->median_seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(tail);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace uqlab::bench
