#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "riskaudit/curve.hpp"

namespace riskaudit {

/// Test-set bootstrap parameters. Replicate k of a stream draws from an
/// RNG keyed by (base_seed, stream_id, k), so results are independent of
/// execution order and worker count.
struct BootstrapPlan {
  int n_replicates = 200;
  double ci_level = 0.95;
  std::uint64_t base_seed = 0;
  double drop_threshold = 0.5;  // dropped fraction above which the estimate is flagged
};

/// Point estimate plus bootstrap distribution summary. Median and interval
/// bounds are empirical order statistics (no interpolation): with m
/// surviving replicates and level c, the bounds sit at ranks
/// ceil((1-c)/2 * m) and ceil((1+c)/2 * m). Replicates where the metric is
/// undefined are dropped and counted.
struct MetricEstimate {
  std::optional<double> point_estimate;
  std::optional<double> median;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
  int n_replicates_used = 0;
  int n_replicates_dropped = 0;
  bool unreliable = false;
};

/// The unit a bootstrap resamples: parallel score/outcome columns, already
/// sorted ascending by score, plus an optional group-membership column for
/// metrics that need the whole sample as context (EUR, representation).
class SampleBlock {
 public:
  SampleBlock(std::vector<double> scores, std::vector<std::uint8_t> outcomes);
  SampleBlock(std::vector<double> scores, std::vector<std::uint8_t> outcomes,
              std::vector<std::uint8_t> in_group);

  std::size_t size() const { return scores_.size(); }
  std::span<const double> scores() const { return scores_; }
  std::span<const std::uint8_t> outcomes() const { return outcomes_; }
  std::span<const std::uint8_t> in_group() const { return in_group_; }
  bool has_group() const { return !in_group_.empty(); }

  /// Draws size() rows with replacement (deterministically from the given
  /// stream) into `out`, which comes back sorted by score because rows are
  /// emitted in this block's order.
  void resample_into(SampleBlock& out, std::uint64_t base_seed, std::uint64_t stream_id,
                     std::uint64_t replicate) const;

 private:
  SampleBlock() = default;
  void sort_by_score();

  std::vector<double> scores_;
  std::vector<std::uint8_t> outcomes_;
  std::vector<std::uint8_t> in_group_;
  mutable std::vector<std::uint32_t> draw_counts_;  // scratch reused across replicates
};

using ScalarMetricFn = std::function<std::optional<double>(const SampleBlock&)>;

/// Evaluates `metric` on the original block (the point estimate) and on
/// plan.n_replicates resampled blocks; summarizes the surviving replicate
/// values. All replicates dropped leaves median/CI unset with the
/// unreliable flag raised.
MetricEstimate bootstrap_metric(const SampleBlock& samples, const ScalarMetricFn& metric,
                                const BootstrapPlan& plan, std::uint64_t stream_id);

/// A curve evaluated on a fixed shared x-grid; NaN marks grid points where
/// the curve is undefined for that replicate.
using GridCurveFn = std::function<std::vector<double>(const SampleBlock&)>;

/// Pointwise percentile bands from replicate curves on a shared grid; the
/// center line is the curve of the original (unresampled) block. Grid
/// points with no surviving replicate values get a NaN band.
CurveSeries bootstrap_curve(const SampleBlock& samples, const GridCurveFn& curve,
                            std::span<const double> grid, const BootstrapPlan& plan,
                            std::uint64_t stream_id);

/// Order-statistic percentile used for all bootstrap summaries. q in (0,1];
/// `sorted` must be ascending and nonempty.
double percentile_rank(std::span<const double> sorted, double q);

}  // namespace riskaudit
