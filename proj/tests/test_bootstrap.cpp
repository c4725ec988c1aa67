#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskaudit/bootstrap.hpp"
#include "riskaudit/discrimination.hpp"
#include "riskaudit/rng.hpp"
#include "riskaudit/synthetic.hpp"
#include "test_support.hpp"

using namespace riskaudit;

namespace {

std::optional<double> outcome_mean(const SampleBlock& b) {
  double sum = 0.0;
  for (auto y : b.outcomes()) sum += y;
  return sum / double(b.size());
}

std::optional<double> block_auroc(const SampleBlock& b) {
  return auroc(b.scores(), b.outcomes());
}

}  // namespace

TEST_CASE("degenerate metric distribution collapses the interval") {
  SampleBlock block({0.3, 0.5, 0.7, 0.9}, {1, 1, 1, 1});
  BootstrapPlan plan{50, 0.95, 7, 0.5};
  auto est = bootstrap_metric(block, outcome_mean, plan, 1);
  CHECK(*est.point_estimate == doctest::Approx(1.0));
  CHECK(*est.median == doctest::Approx(1.0));
  CHECK(*est.ci_lower == doctest::Approx(1.0));
  CHECK(*est.ci_upper == doctest::Approx(1.0));
  CHECK(est.n_replicates_used == 50);
  CHECK(est.n_replicates_dropped == 0);
  CHECK(!est.unreliable);
}

TEST_CASE("undefined replicates are dropped and counted") {
  // one positive among five: resamples often lose the positive class
  SampleBlock block({0.1, 0.2, 0.3, 0.4, 0.9}, {0, 0, 0, 0, 1});
  BootstrapPlan plan{200, 0.95, 11, 0.5};
  auto est = bootstrap_metric(block, block_auroc, plan, 2);
  CHECK(est.point_estimate.has_value());
  CHECK(est.n_replicates_dropped > 0);
  CHECK(est.n_replicates_used + est.n_replicates_dropped == 200);
  // about a third of replicates lose the positive; flag stays ok at 0.5
  CHECK(est.n_replicates_used > 0);
}

TEST_CASE("all replicates dropped leaves a flagged missing estimate") {
  SampleBlock block({0.2, 0.4, 0.8}, {0, 0, 0});  // single-class, auroc undefined
  BootstrapPlan plan{20, 0.95, 3, 0.5};
  auto est = bootstrap_metric(block, block_auroc, plan, 9);
  CHECK(!est.point_estimate.has_value());
  CHECK(!est.median.has_value());
  CHECK(est.n_replicates_used == 0);
  CHECK(est.n_replicates_dropped == 20);
  CHECK(est.unreliable);
}

TEST_CASE("identical plan and stream id reproduce the estimate bit for bit") {
  StreamRng rng(5);
  auto inst = testsup::random_instance(rng, 100, false, true);
  SampleBlock block(inst.scores, inst.outcomes);
  BootstrapPlan plan{100, 0.9, 1234, 0.5};

  auto a = bootstrap_metric(block, block_auroc, plan, 42);
  auto b = bootstrap_metric(block, block_auroc, plan, 42);
  CHECK(*a.median == *b.median);
  CHECK(*a.ci_lower == *b.ci_lower);
  CHECK(*a.ci_upper == *b.ci_upper);

  // a different stream id moves the replicate draws
  auto c = bootstrap_metric(block, block_auroc, plan, 43);
  CHECK((*c.median != *a.median || *c.ci_lower != *a.ci_lower || *c.ci_upper != *a.ci_upper));
}

TEST_CASE("percentile convention uses ceil-rank order statistics") {
  std::vector<double> sorted(200);
  for (int i = 0; i < 200; ++i) sorted[i] = double(i + 1);  // values 1..200
  CHECK(percentile_rank(sorted, 0.025) == 5.0);    // rank ceil(5) = 5
  CHECK(percentile_rank(sorted, 0.975) == 195.0);  // rank ceil(195)
  CHECK(percentile_rank(sorted, 0.5) == 100.0);
  CHECK(percentile_rank(sorted, 1.0) == 200.0);

  std::vector<double> tiny = {3.5};
  CHECK(percentile_rank(tiny, 0.025) == 3.5);
  CHECK(percentile_rank(tiny, 0.975) == 3.5);
}

TEST_CASE("interval bounds bracket the median") {
  StreamRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testsup::random_instance(rng, 30 + rng.next_index(100), false, true);
    SampleBlock block(inst.scores, inst.outcomes);
    BootstrapPlan plan{80, 0.95, rng.next_u64(), 0.5};
    auto est = bootstrap_metric(block, block_auroc, plan, trial);
    if (!est.median) continue;
    CHECK(*est.ci_lower <= *est.median);
    CHECK(*est.median <= *est.ci_upper);
  }
}

TEST_CASE("median CI width shrinks as the group grows") {
  auto small_stream = generate_calibration_stream(100, Scenario::Perfect, 21);
  auto large_stream = generate_calibration_stream(10000, Scenario::Perfect, 22);
  BootstrapPlan plan{200, 0.95, 7, 0.5};

  auto small_est = bootstrap_metric(SampleBlock(small_stream.scores, small_stream.outcomes),
                                    block_auroc, plan, 1);
  auto large_est = bootstrap_metric(SampleBlock(large_stream.scores, large_stream.outcomes),
                                    block_auroc, plan, 2);
  double small_width = *small_est.ci_upper - *small_est.ci_lower;
  double large_width = *large_est.ci_upper - *large_est.ci_lower;
  CHECK(small_width > large_width);
}

TEST_CASE("bootstrap_curve: constant curve has zero-width bands") {
  SampleBlock block({0.1, 0.5, 0.9, 0.3}, {1, 1, 1, 1});
  std::vector<double> grid = {0.0, 0.5, 1.0};
  auto curve = bootstrap_curve(
      block, [](const SampleBlock& b) { return std::vector<double>(3, 1.0); }, grid,
      BootstrapPlan{50, 0.95, 3, 0.5}, 8);
  REQUIRE(curve.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(curve.y[i] == 1.0);
    CHECK(curve.lower[i] == 1.0);
    CHECK(curve.upper[i] == 1.0);
  }
}

TEST_CASE("bootstrap_curve bands widen for smaller samples") {
  BootstrapPlan plan{120, 0.95, 19, 0.5};
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.2 + 0.6 * i / 20.0);

  auto band_width = [&](std::size_t n, std::uint64_t seed) {
    auto stream = generate_calibration_stream(n, Scenario::Perfect, seed);
    SampleBlock block(stream.scores, stream.outcomes);
    auto curve = bootstrap_curve(
        block,
        [&grid](const SampleBlock& b) {
          // binned outcome frequency per grid point neighborhood
          std::vector<double> out(grid.size(), 0.0);
          for (std::size_t j = 0; j < grid.size(); ++j) {
            double lo = grid[j] - 0.05, hi = grid[j] + 0.05;
            std::size_t count = 0, pos = 0;
            auto scores = b.scores();
            auto outcomes = b.outcomes();
            for (std::size_t i = 0; i < scores.size(); ++i) {
              if (scores[i] >= lo && scores[i] < hi) {
                ++count;
                pos += outcomes[i];
              }
            }
            out[j] = count ? double(pos) / double(count)
                           : std::numeric_limits<double>::quiet_NaN();
          }
          return out;
        },
        grid, plan, 4);
    double total = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) total += curve.upper[j] - curve.lower[j];
    return total / double(grid.size());
  };

  CHECK(band_width(10000, 31) < band_width(300, 32));
}

TEST_CASE("coverage of the percentile interval is near nominal") {
  // Bernoulli(0.5) groups of 200; the interval should catch 0.5 most of
  // the time. The formal [85%, 99%] gate runs in the acceptance suite with
  // 200 simulations; this is a faster sanity check.
  StreamRng rng(606);
  int hits = 0;
  const int sims = 60;
  for (int s = 0; s < sims; ++s) {
    std::vector<double> scores(200);
    std::vector<std::uint8_t> outcomes(200);
    for (int i = 0; i < 200; ++i) {
      scores[i] = rng.next_double();
      outcomes[i] = rng.next_bernoulli(0.5) ? 1 : 0;
    }
    SampleBlock block(scores, outcomes);
    auto est = bootstrap_metric(block, outcome_mean, BootstrapPlan{200, 0.95, rng.next_u64(), 0.5},
                                static_cast<std::uint64_t>(s));
    if (*est.ci_lower <= 0.5 && 0.5 <= *est.ci_upper) ++hits;
  }
  CHECK(hits >= sims * 3 / 4);
}
