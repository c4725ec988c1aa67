#include "riskaudit/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "riskaudit/rng.hpp"

namespace riskaudit {

SampleBlock::SampleBlock(std::vector<double> scores, std::vector<std::uint8_t> outcomes)
    : scores_(std::move(scores)), outcomes_(std::move(outcomes)) {
  if (scores_.empty()) throw std::invalid_argument("empty sample block");
  if (outcomes_.size() != scores_.size())
    throw std::invalid_argument("scores/outcomes length mismatch");
  sort_by_score();
}

SampleBlock::SampleBlock(std::vector<double> scores, std::vector<std::uint8_t> outcomes,
                         std::vector<std::uint8_t> in_group)
    : scores_(std::move(scores)), outcomes_(std::move(outcomes)), in_group_(std::move(in_group)) {
  if (scores_.empty()) throw std::invalid_argument("empty sample block");
  if (outcomes_.size() != scores_.size() || in_group_.size() != scores_.size())
    throw std::invalid_argument("scores/outcomes/in_group length mismatch");
  sort_by_score();
}

void SampleBlock::sort_by_score() {
  if (std::is_sorted(scores_.begin(), scores_.end())) return;
  std::vector<std::uint32_t> order(scores_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores_[a] < scores_[b]; });
  std::vector<double> s(scores_.size());
  std::vector<std::uint8_t> o(scores_.size()), g;
  if (!in_group_.empty()) g.resize(scores_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s[i] = scores_[order[i]];
    o[i] = outcomes_[order[i]];
    if (!g.empty()) g[i] = in_group_[order[i]];
  }
  scores_ = std::move(s);
  outcomes_ = std::move(o);
  in_group_ = std::move(g);
}

void SampleBlock::resample_into(SampleBlock& out, std::uint64_t base_seed,
                                std::uint64_t stream_id, std::uint64_t replicate) const {
  const std::size_t n = scores_.size();
  StreamRng rng(base_seed, stream_id, replicate);

  // Draw row multiplicities, then emit rows in block order so the
  // resampled block is sorted without another sort.
  draw_counts_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++draw_counts_[rng.next_index(n)];

  out.scores_.clear();
  out.outcomes_.clear();
  out.in_group_.clear();
  out.scores_.reserve(n);
  out.outcomes_.reserve(n);
  if (!in_group_.empty()) out.in_group_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t k = 0; k < draw_counts_[i]; ++k) {
      out.scores_.push_back(scores_[i]);
      out.outcomes_.push_back(outcomes_[i]);
      if (!in_group_.empty()) out.in_group_.push_back(in_group_[i]);
    }
  }
}

double percentile_rank(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
  // The 1e-9 backs off double noise in q*m (e.g. 0.025*200 evaluating just
  // above 5) so the rank matches the exact convention.
  double r = std::ceil(q * double(sorted.size()) - 1e-9);
  std::size_t rank = static_cast<std::size_t>(std::max(1.0, r));
  rank = std::min(rank, sorted.size());
  return sorted[rank - 1];
}

MetricEstimate bootstrap_metric(const SampleBlock& samples, const ScalarMetricFn& metric,
                                const BootstrapPlan& plan, std::uint64_t stream_id) {
  if (plan.n_replicates < 1) throw std::invalid_argument("n_replicates must be >= 1");
  if (!(plan.ci_level > 0.0 && plan.ci_level < 1.0))
    throw std::invalid_argument("ci_level must be in (0,1)");

  MetricEstimate est;
  est.point_estimate = metric(samples);

  std::vector<double> values;
  values.reserve(plan.n_replicates);
  SampleBlock replicate = samples;  // reuse buffers across replicates
  for (int k = 0; k < plan.n_replicates; ++k) {
    samples.resample_into(replicate, plan.base_seed, stream_id, static_cast<std::uint64_t>(k));
    if (auto v = metric(replicate))
      values.push_back(*v);
    else
      ++est.n_replicates_dropped;
  }
  est.n_replicates_used = static_cast<int>(values.size());
  est.unreliable =
      double(est.n_replicates_dropped) > plan.drop_threshold * double(plan.n_replicates);

  if (!values.empty()) {
    std::sort(values.begin(), values.end());
    est.median = percentile_rank(values, 0.5);
    est.ci_lower = percentile_rank(values, (1.0 - plan.ci_level) / 2.0);
    est.ci_upper = percentile_rank(values, (1.0 + plan.ci_level) / 2.0);
  } else {
    est.unreliable = true;
  }
  return est;
}

CurveSeries bootstrap_curve(const SampleBlock& samples, const GridCurveFn& curve,
                            std::span<const double> grid, const BootstrapPlan& plan,
                            std::uint64_t stream_id) {
  if (plan.n_replicates < 1) throw std::invalid_argument("n_replicates must be >= 1");

  CurveSeries out;
  out.x.assign(grid.begin(), grid.end());
  out.y = curve(samples);
  if (out.y.size() != grid.size())
    throw std::invalid_argument("curve function must return one value per grid point");

  // replicate_values[j] collects the surviving values at grid point j.
  std::vector<std::vector<double>> replicate_values(grid.size());
  SampleBlock replicate = samples;
  for (int k = 0; k < plan.n_replicates; ++k) {
    samples.resample_into(replicate, plan.base_seed, stream_id, static_cast<std::uint64_t>(k));
    std::vector<double> ys = curve(replicate);
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (!std::isnan(ys[j])) replicate_values[j].push_back(ys[j]);
  }

  out.lower.resize(grid.size());
  out.upper.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto& vals = replicate_values[j];
    if (vals.empty()) {
      out.lower[j] = std::numeric_limits<double>::quiet_NaN();
      out.upper[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::sort(vals.begin(), vals.end());
    out.lower[j] = percentile_rank(vals, (1.0 - plan.ci_level) / 2.0);
    out.upper[j] = percentile_rank(vals, (1.0 + plan.ci_level) / 2.0);
  }
  return out;
}

}  // namespace riskaudit
