#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uqlab::bench {

/// Environment variable that overrides the per-cell time budget (seconds).
inline constexpr const char* kBudgetEnvVar = "UQLAB_BENCH_BUDGET_SECONDS";

/// Grid of stochastic-network shapes whose prediction cost is measured.
struct ScalingConfig {
  std::vector<std::size_t> depths = {2, 4, 8, 16, 32, 64};
  std::vector<std::size_t> widths = {16, 32, 64, 128, 256, 512, 1024, 2048};
  std::vector<std::size_t> sample_counts = {1, 10, 100, 1000};
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
  /// Wall-time budget per cell (warmup plus repeats).
  double budget_seconds = 30.0;
  /// Nets with more parameters than this are not built; their cells are
  /// reported as truncated. 2^25 parameters hold mean + stddev in ~512 MiB.
  std::size_t max_parameters = std::size_t{1} << 25;
  std::size_t input_dim = 1;
  std::size_t output_dim = 1;
  /// Rows of random input data pushed through each sampled network.
  std::size_t batch_rows = 1;
  double weight_stddev = 0.1;

  void validate() const;
};

/// Applies kBudgetEnvVar if set; throws ConfigError on a malformed value.
void apply_budget_override(ScalingConfig& cfg);

struct ScalingRecord {
  std::size_t depth = 0;
  std::size_t width = 0;
  std::size_t n_samples = 0;
  std::size_t params = 0;
  /// Completed timed repeats, in seconds.
  std::vector<double> repeat_seconds;
  /// Absent when the cell ran out of budget (or was never attempted because
  /// a cheaper cell already had).
  std::optional<double> median_seconds;

  bool truncated() const noexcept { return !median_seconds.has_value(); }
  friend bool operator==(const ScalingRecord&, const ScalingRecord&) = default;
};

double median(std::vector<double> values);

using ProgressFn = std::function<void(const ScalingRecord&)>;

/// Sweeps depth x width x sample count. Each cell builds a fixed-seed random
/// StochasticNet, runs one untimed warmup sample, then times `repeats` calls
/// of stochastic_predict on a monotonic clock. Cost is monotone in every
/// axis, so a cell dominated by an already-truncated cell is recorded as
/// truncated without running it.
std::vector<ScalingRecord> run_scaling(const ScalingConfig& cfg, const ProgressFn& progress = {});

/// Config lines suitable for the report header.
std::vector<std::string> describe(const ScalingConfig& cfg);

inline constexpr std::string_view kTimeoutSentinel = "timeout";
/// all_repeats value of a cell in which no repeat completed.
inline constexpr std::string_view kNoRepeats = "none";
inline constexpr std::string_view kScalingHeader = "depth;width;n_samples;params;median_seconds;all_repeats";

/// Semicolon CSV. `comments` are emitted first, each prefixed "# ". Repeat
/// times are joined with '|' ("none" if no repeat finished). Truncated cells
/// carry "timeout" as median.
std::string emit_scaling_report(std::span<const ScalingRecord> records,
                                std::span<const std::string> comments = {});
std::vector<ScalingRecord> parse_scaling_report(std::string_view text);

/// Number of strict decreases of the median along the sample-count axis for
/// one (depth, width) line, ignoring truncated cells.
std::size_t sample_axis_inversions(std::span<const ScalingRecord> records, std::size_t depth, std::size_t width);

/// Least-squares slope of log(median) on log(width) over the `tail` largest
/// widths of one (depth, n_samples) line; empty if any of them is truncated.
std::optional<double> width_slope(std::span<const ScalingRecord> records, std::size_t depth,
                                  std::size_t n_samples, std::size_t tail = 3);

}  // namespace uqlab::bench
