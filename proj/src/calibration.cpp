#include "riskaudit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace riskaudit {

namespace {

// Samples sorted by score (stable, so ties keep their input order), with
// prefix sums so any contiguous bin's statistics are O(1).
struct SortedCache {
  std::vector<double> scores;
  std::vector<std::uint8_t> outcomes;
  std::vector<double> score_prefix;        // score_prefix[i] = sum of scores[0..i)
  std::vector<std::uint32_t> outcome_prefix;
  std::vector<std::uint32_t> run_end;      // one-past-end of the tie run containing i

  std::size_t size() const { return scores.size(); }

  CalibrationBin bin_of(std::size_t begin, std::size_t end) const {
    CalibrationBin b;
    b.count = end - begin;
    b.mean_prediction = (score_prefix[end] - score_prefix[begin]) / double(b.count);
    b.mean_outcome =
        double(outcome_prefix[end] - outcome_prefix[begin]) / double(b.count);
    return b;
  }
};

SortedCache make_sorted_cache(std::span<const double> scores,
                              std::span<const std::uint8_t> outcomes) {
  const std::size_t n = scores.size();
  SortedCache c;
  c.scores.resize(n);
  c.outcomes.resize(n);
  if (std::is_sorted(scores.begin(), scores.end())) {
    std::copy(scores.begin(), scores.end(), c.scores.begin());
    std::copy(outcomes.begin(), outcomes.end(), c.outcomes.begin());
  } else {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });
    for (std::size_t i = 0; i < n; ++i) {
      c.scores[i] = scores[order[i]];
      c.outcomes[i] = outcomes[order[i]];
    }
  }
  c.score_prefix.resize(n + 1, 0.0);
  c.outcome_prefix.resize(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    c.score_prefix[i + 1] = c.score_prefix[i] + c.scores[i];
    c.outcome_prefix[i + 1] = c.outcome_prefix[i] + c.outcomes[i];
  }
  c.run_end.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && c.scores[j] == c.scores[i]) ++j;
    for (std::size_t k = i; k < j; ++k) c.run_end[k] = static_cast<std::uint32_t>(j);
    i = j;
  }
  return c;
}

std::vector<CalibrationBin> equal_mass_bins(const SortedCache& c, std::size_t n_bins) {
  const std::size_t n = c.size();
  std::vector<CalibrationBin> bins;
  bins.reserve(n_bins);
  std::size_t prev = 0;
  for (std::size_t k = 1; k <= n_bins; ++k) {
    std::size_t b = (k == n_bins) ? n : (k * n) / n_bins;
    // Never split a tie run: push the boundary to the end of the run.
    if (b > 0 && b < n && c.scores[b - 1] == c.scores[b]) b = c.run_end[b];
    if (b <= prev) continue;
    bins.push_back(c.bin_of(prev, b));
    prev = b;
  }
  return bins;
}

std::vector<CalibrationBin> equal_width_bins(const SortedCache& c, std::size_t n_bins) {
  const std::size_t n = c.size();
  std::vector<CalibrationBin> bins;
  std::size_t begin = 0;
  for (std::size_t b = 0; b < n_bins && begin < n; ++b) {
    std::size_t end;
    if (b + 1 == n_bins) {
      end = n;  // last bin closed at 1
    } else {
      double edge = double(b + 1) / double(n_bins);
      end = std::lower_bound(c.scores.begin() + begin, c.scores.end(), edge) - c.scores.begin();
    }
    if (end > begin) {
      bins.push_back(c.bin_of(begin, end));
      begin = end;
    }
  }
  return bins;
}

std::vector<CalibrationBin> make_bins(const SortedCache& c, std::size_t n_bins,
                                      BinningScheme scheme) {
  return scheme == BinningScheme::EqualMass ? equal_mass_bins(c, n_bins)
                                            : equal_width_bins(c, n_bins);
}

bool curve_is_monotonic(const std::vector<CalibrationBin>& bins) {
  for (std::size_t i = 1; i < bins.size(); ++i)
    if (bins[i].mean_outcome < bins[i - 1].mean_outcome) return false;
  return true;
}

}  // namespace

BinnedCalibration bin_samples(std::span<const double> scores,
                              std::span<const std::uint8_t> outcomes, std::size_t n_bins,
                              BinningScheme scheme) {
  if (scores.size() != outcomes.size())
    throw std::invalid_argument("scores/outcomes length mismatch");
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  if (n_bins > scores.size())
    throw std::invalid_argument("n_bins exceeds the sample count");

  SortedCache c = make_sorted_cache(scores, outcomes);
  BinnedCalibration out;
  out.total_count = c.size();
  out.scheme = scheme;
  out.n_bins_requested = n_bins;
  out.bins = make_bins(c, n_bins, scheme);
  return out;
}

double ece(const BinnedCalibration& binned) {
  if (binned.bins.empty()) throw std::invalid_argument("ece on empty binning");
  double sum = 0.0;
  for (const auto& b : binned.bins)
    sum += double(b.count) / double(binned.total_count) *
           std::abs(b.mean_prediction - b.mean_outcome);
  return sum;
}

double rmsce(const BinnedCalibration& binned) {
  if (binned.bins.empty()) throw std::invalid_argument("rmsce on empty binning");
  double sum = 0.0;
  for (const auto& b : binned.bins) {
    double gap = b.mean_prediction - b.mean_outcome;
    sum += double(b.count) / double(binned.total_count) * gap * gap;
  }
  return std::sqrt(sum);
}

std::optional<double> debiased_rmsce(const BinnedCalibration& binned) {
  if (binned.bins.empty()) throw std::invalid_argument("debiased_rmsce on empty binning");
  double sum = 0.0;
  for (const auto& b : binned.bins) {
    if (b.count < 2) return std::nullopt;  // correction divides by n_b - 1
    double gap = b.mean_prediction - b.mean_outcome;
    double correction = b.mean_outcome * (1.0 - b.mean_outcome) / double(b.count - 1);
    sum += double(b.count) / double(binned.total_count) * (gap * gap - correction);
  }
  return std::sqrt(std::max(0.0, sum));
}

namespace {

std::size_t search_bins(const SortedCache& c, std::size_t min_per_bin, BinningScheme scheme,
                        BinSearch search) {
  const std::size_t hi_limit = c.size() / min_per_bin;
  auto monotonic = [&](std::size_t m) { return curve_is_monotonic(make_bins(c, m, scheme)); };

  if (search == BinSearch::LinearScan) {
    // Reference method: grow the bin count one by one and stop at the
    // first count whose curve is no longer monotonic.
    std::size_t last = 1;
    for (std::size_t m = 2; m <= hi_limit; ++m) {
      if (!monotonic(m)) break;
      last = m;
    }
    return last;
  }

  // Interval search assuming "monotonic at m" is monotone in m; that
  // assumption can fail, so LinearScan exists as the exact reference.
  std::size_t lo = 1, hi = hi_limit;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (monotonic(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

std::optional<double> debiased_of_bins(const std::vector<CalibrationBin>& bins, std::size_t n) {
  double sum = 0.0;
  for (const auto& b : bins) {
    if (b.count < 2) return std::nullopt;
    double gap = b.mean_prediction - b.mean_outcome;
    double correction = b.mean_outcome * (1.0 - b.mean_outcome) / double(b.count - 1);
    sum += double(b.count) / double(n) * (gap * gap - correction);
  }
  return std::sqrt(std::max(0.0, sum));
}

}  // namespace

std::optional<std::size_t> max_monotonic_bins(std::span<const double> scores,
                                              std::span<const std::uint8_t> outcomes,
                                              std::size_t min_per_bin, BinningScheme scheme,
                                              BinSearch search) {
  if (scores.size() != outcomes.size())
    throw std::invalid_argument("scores/outcomes length mismatch");
  if (min_per_bin < 2) throw std::invalid_argument("min_per_bin must be >= 2");
  if (scores.size() < min_per_bin) return std::nullopt;
  SortedCache c = make_sorted_cache(scores, outcomes);
  return search_bins(c, min_per_bin, scheme, search);
}

std::optional<double> drmsce(std::span<const double> scores,
                             std::span<const std::uint8_t> outcomes, std::size_t min_per_bin) {
  if (scores.size() != outcomes.size())
    throw std::invalid_argument("scores/outcomes length mismatch");
  if (min_per_bin < 2) throw std::invalid_argument("min_per_bin must be >= 2");
  if (scores.size() < min_per_bin) return std::nullopt;
  SortedCache c = make_sorted_cache(scores, outcomes);
  std::size_t n_bins = search_bins(c, min_per_bin, BinningScheme::EqualMass, BinSearch::Binary);
  return debiased_of_bins(equal_mass_bins(c, n_bins), c.size());
}

CalibrationResult evaluate_calibration(const CalibrationEstimatorConfig& config,
                                       std::span<const double> scores,
                                       std::span<const std::uint8_t> outcomes) {
  CalibrationResult result;
  const std::size_t n = scores.size();

  std::size_t n_bins;
  if (config.policy.kind == BinPolicy::Kind::AdaptiveSearch) {
    auto found = max_monotonic_bins(scores, outcomes, config.policy.min_per_bin, config.binning);
    if (!found) {
      result.missing_reason = "too_few_samples";
      return result;
    }
    n_bins = *found;
  } else {
    n_bins = config.policy.fixed_bins;
    if (n_bins > n) {
      result.missing_reason = "too_few_samples";
      return result;
    }
  }
  result.requested_bins = n_bins;

  BinnedCalibration binned = bin_samples(scores, outcomes, n_bins, config.binning);
  result.realized_bins = binned.bins.size();
  switch (config.estimator) {
    case CalibrationEstimator::EceL1:
      result.value = ece(binned);
      break;
    case CalibrationEstimator::Rmsce:
      result.value = rmsce(binned);
      break;
    case CalibrationEstimator::DebiasedRmsce:
      result.value = debiased_rmsce(binned);
      if (!result.value) result.missing_reason = "degenerate_bins";
      break;
  }
  return result;
}

std::vector<double> loess_fit_on_grid(std::span<const double> scores,
                                      std::span<const std::uint8_t> outcomes, double span,
                                      std::span<const double> grid) {
  if (scores.size() != outcomes.size())
    throw std::invalid_argument("scores/outcomes length mismatch");
  if (!(span > 0.0 && span <= 1.0)) throw std::invalid_argument("span must be in (0,1]");
  const std::size_t n = scores.size();
  if (n == 0) throw std::invalid_argument("loess on empty sample");

  SortedCache c = make_sorted_cache(scores, outcomes);
  const std::size_t k =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(span * double(n))), 2, n);

  std::vector<double> fitted;
  fitted.reserve(grid.size());
  std::size_t lo = 0;  // window start; grid is evaluated in ascending order
  for (double x0 : grid) {
    while (lo + k < n && (x0 - c.scores[lo]) > (c.scores[lo + k] - x0)) ++lo;
    const std::size_t hi = lo + k;

    double d = std::max(x0 - c.scores[lo], c.scores[hi - 1] - x0);
    double y;
    if (d <= 0.0) {
      // Degenerate neighborhood: every window score equals x0. Use the
      // local mean over the whole tie run, not an arbitrary k-subset.
      std::size_t lo2 = lo, hi2 = hi;
      while (lo2 > 0 && c.scores[lo2 - 1] == x0) --lo2;
      while (hi2 < n && c.scores[hi2] == x0) ++hi2;
      y = double(c.outcome_prefix[hi2] - c.outcome_prefix[lo2]) / double(hi2 - lo2);
    } else {
      double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        double u = std::abs(c.scores[i] - x0) / d;
        if (u >= 1.0) continue;
        double t = 1.0 - u * u * u;
        double w = t * t * t;
        double dx = c.scores[i] - x0;
        sw += w;
        swx += w * dx;
        swy += w * c.outcomes[i];
        swxx += w * dx * dx;
        swxy += w * dx * c.outcomes[i];
      }
      if (sw <= 0.0) {
        y = double(c.outcome_prefix[hi] - c.outcome_prefix[lo]) / double(k);
      } else {
        double denom = sw * swxx - swx * swx;
        if (denom <= 1e-12 * sw * swxx) {
          y = swy / sw;
        } else {
          double slope = (sw * swxy - swx * swy) / denom;
          y = (swy - slope * swx) / sw;  // intercept at x0
        }
      }
    }
    fitted.push_back(std::clamp(y, 0.0, 1.0));
  }
  return fitted;
}

std::optional<CurveSeries> reliability_curve(std::span<const double> scores,
                                             std::span<const std::uint8_t> outcomes, double span,
                                             std::size_t grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  if (scores.size() < 10) return std::nullopt;

  auto [min_it, max_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *min_it, hi = *max_it;
  std::vector<double> grid(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j)
    grid[j] = lo + (hi - lo) * double(j) / double(grid_size - 1);

  CurveSeries curve;
  curve.x = grid;
  curve.y = loess_fit_on_grid(scores, outcomes, span, grid);
  curve.x_label = "predicted risk";
  curve.y_label = "observed frequency";
  return curve;
}

}  // namespace riskaudit
