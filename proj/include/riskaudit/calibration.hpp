#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskaudit/curve.hpp"

namespace riskaudit {

enum class BinningScheme { EqualWidth, EqualMass };

/// One calibration bin: sample count, mean predicted risk, mean outcome.
struct CalibrationBin {
  std::size_t count = 0;
  double mean_prediction = 0.0;
  double mean_outcome = 0.0;
};

/// Partition of scored samples into bins, ordered by nondecreasing mean
/// prediction. Empty equal-width bins are dropped; total_count always
/// equals the number of samples. With equal-mass binning, tied scores are
/// never split across bins, so the realized bin count may be below
/// n_bins_requested.
struct BinnedCalibration {
  std::vector<CalibrationBin> bins;
  std::size_t total_count = 0;
  BinningScheme scheme = BinningScheme::EqualWidth;
  std::size_t n_bins_requested = 0;
};

enum class CalibrationEstimator { EceL1, Rmsce, DebiasedRmsce };

/// How the bin count is chosen: a fixed count, or the adaptive search for
/// the largest count that keeps the calibration curve monotonic.
struct BinPolicy {
  enum class Kind { Fixed, AdaptiveSearch } kind = Kind::Fixed;
  std::size_t fixed_bins = 15;
  std::size_t min_per_bin = 10;

  static BinPolicy fixed(std::size_t n) { return {Kind::Fixed, n, 10}; }
  static BinPolicy adaptive(std::size_t min_per_bin = 10) {
    return {Kind::AdaptiveSearch, 15, min_per_bin};
  }
};

/// A named (binning, estimator, bin policy) combination.
struct CalibrationEstimatorConfig {
  std::string label;
  BinningScheme binning = BinningScheme::EqualWidth;
  CalibrationEstimator estimator = CalibrationEstimator::EceL1;
  BinPolicy policy = BinPolicy::fixed(15);
};

enum class BinSearch { Binary, LinearScan };

/// Assigns samples to n_bins bins. Equal-width: bin b covers
/// [(b-1)/n, b/n) with the last bin closed at 1. Equal-mass: quantile split
/// of the score-sorted samples (stable; tied scores stay contiguous).
/// Throws std::invalid_argument when n_bins < 1 or n_bins > sample count.
BinnedCalibration bin_samples(std::span<const double> scores,
                              std::span<const std::uint8_t> outcomes, std::size_t n_bins,
                              BinningScheme scheme);

/// Expected calibration error: sum_b (n_b/n) |mean_pred_b - mean_outcome_b|.
double ece(const BinnedCalibration& binned);

/// Root mean squared calibration error:
/// sqrt( sum_b (n_b/n) (mean_pred_b - mean_outcome_b)^2 ).
double rmsce(const BinnedCalibration& binned);

/// Bias-corrected RMSCE. Subtracts the within-bin outcome variance term
/// y_b(1-y_b)/(n_b-1) from each squared bin gap before the weighted sum;
/// the sum is clamped at zero so the estimator stays real. Undefined
/// (nullopt) when any bin has fewer than 2 samples.
std::optional<double> debiased_rmsce(const BinnedCalibration& binned);

/// Largest bin count in [1, floor(n / min_per_bin)] whose calibration
/// curve has nondecreasing mean outcome (ties allowed). The default binary
/// search treats monotonicity as a monotone predicate in the bin count,
/// which it is not guaranteed to be; BinSearch::LinearScan is the exact
/// reference it approximates, growing the count one by one and stopping at
/// the first non-monotonic curve. Undefined when n < min_per_bin.
std::optional<std::size_t> max_monotonic_bins(std::span<const double> scores,
                                              std::span<const std::uint8_t> outcomes,
                                              std::size_t min_per_bin, BinningScheme scheme,
                                              BinSearch search = BinSearch::Binary);

/// The debiased adaptive-bin-count calibration error: equal-mass binning
/// with the bin count from max_monotonic_bins (min 10 per bin), then the
/// debiased RMSCE. Undefined when n < min_per_bin or a realized bin cannot
/// be debiased.
std::optional<double> drmsce(std::span<const double> scores,
                             std::span<const std::uint8_t> outcomes,
                             std::size_t min_per_bin = 10);

/// Result of evaluating one CalibrationEstimatorConfig; realized_bins is
/// the bin count actually used (after adaptive search and tie merging).
struct CalibrationResult {
  std::optional<double> value;
  std::size_t requested_bins = 0;
  std::size_t realized_bins = 0;
  std::string missing_reason;  // empty when value is set
};

CalibrationResult evaluate_calibration(const CalibrationEstimatorConfig& config,
                                       std::span<const double> scores,
                                       std::span<const std::uint8_t> outcomes);

/// Loess reliability curve: local-linear regression of outcome on score
/// with tricube weights over the span-fraction nearest neighborhood,
/// evaluated on an evenly spaced grid across [min score, max score] and
/// clamped to [0,1]. Neighborhoods whose scores are all identical fall
/// back to the local mean. Undefined when n < 10.
std::optional<CurveSeries> reliability_curve(std::span<const double> scores,
                                             std::span<const std::uint8_t> outcomes,
                                             double span = 0.75, std::size_t grid_size = 101);

/// Same fit evaluated on a caller-supplied grid; used to bootstrap bands
/// on a shared grid. Returns one fitted value per grid point.
std::vector<double> loess_fit_on_grid(std::span<const double> scores,
                                      std::span<const std::uint8_t> outcomes, double span,
                                      std::span<const double> grid);

}  // namespace riskaudit
