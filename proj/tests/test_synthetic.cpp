#include <doctest.h>

#include <cmath>

#include "riskaudit/discrimination.hpp"
#include "riskaudit/synthetic.hpp"

using namespace riskaudit;

TEST_CASE("calibration streams are deterministic and hit their base rates") {
  auto a = generate_calibration_stream(5000, Scenario::Perfect, 12345);
  auto b = generate_calibration_stream(5000, Scenario::Perfect, 12345);
  CHECK(a.scores == b.scores);
  CHECK(a.outcomes == b.outcomes);

  auto c = generate_calibration_stream(5000, Scenario::Perfect, 54321);
  CHECK(a.scores != c.scores);

  // E[Y] = E[R] = 1/2 for the calibrated stream; 3-sigma at n=10000
  auto perfect = generate_calibration_stream(10000, Scenario::Perfect, 1);
  double mean = 0.0;
  for (auto y : perfect.outcomes) mean += y;
  mean /= double(perfect.outcomes.size());
  CHECK(mean == doctest::Approx(0.5).epsilon(0.015));

  // E[Y] = E[R^2] = 1/3 for the square stream
  auto square = generate_calibration_stream(10000, Scenario::Square, 2);
  mean = 0.0;
  for (auto y : square.outcomes) mean += y;
  mean /= double(square.outcomes.size());
  CHECK(mean == doctest::Approx(1.0 / 3.0).epsilon(0.045));
}

TEST_CASE("analytic ground truths") {
  auto perfect = ground_truth_errors(Scenario::Perfect);
  CHECK(perfect.ece == 0.0);
  CHECK(perfect.rmsce == 0.0);

  auto square = ground_truth_errors(Scenario::Square);
  CHECK(square.ece == doctest::Approx(1.0 / 6.0));
  CHECK(square.rmsce == doctest::Approx(std::sqrt(1.0 / 30.0)));

  // Monte Carlo cross-check of both integrals
  auto stream = generate_calibration_stream(200000, Scenario::Square, 9);
  double l1 = 0.0, l2 = 0.0;
  for (double r : stream.scores) {
    double gap = r - r * r;
    l1 += std::abs(gap);
    l2 += gap * gap;
  }
  l1 /= double(stream.scores.size());
  l2 = std::sqrt(l2 / double(stream.scores.size()));
  CHECK(l1 == doctest::Approx(square.ece).epsilon(0.01));
  CHECK(l2 == doctest::Approx(square.rmsce).epsilon(0.01));
}

TEST_CASE("bias study bookkeeping") {
  BiasStudyConfig config;
  config.sample_sizes = {100, 400};
  config.n_repetitions = 5;
  config.seed = 3;
  auto result = run_bias_study(config);

  const auto panel = default_bias_metric_panel();
  CHECK(result.cells.size() == panel.size() * 2 * 2);  // metrics x scenarios x sizes
  for (const auto& cell : result.cells) CHECK(cell.values.size() == 5);
  CHECK(result.square_truth.ece == doctest::Approx(1.0 / 6.0));

  SUBCASE("repetition seeds are independent but reproducible") {
    auto again = run_bias_study(config);
    REQUIRE(again.cells.size() == result.cells.size());
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      REQUIRE(again.cells[i].values.size() == result.cells[i].values.size());
      for (std::size_t r = 0; r < result.cells[i].values.size(); ++r)
        CHECK(again.cells[i].values[r] == result.cells[i].values[r]);
    }
  }
}

TEST_CASE("bias study records inapplicable cells as missing") {
  BiasStudyConfig config;
  config.sample_sizes = {8};  // below any 15-bin or 10-per-bin requirement
  config.n_repetitions = 3;
  auto result = run_bias_study(config);
  for (const auto& cell : result.cells)
    for (const auto& v : cell.values) CHECK(!v.has_value());
}

TEST_CASE("two-group example reproduces its construction") {
  Dataset data = generate_two_group_example(20000, 8);
  REQUIRE(data.size() == 40000);

  auto groups = enumerate_groups(data, {"group"}, 1, 1);
  REQUIRE(groups.size() == 3);  // overall + blue + orange

  const GroupIndex* blue = nullptr;
  const GroupIndex* orange = nullptr;
  for (const auto& g : groups) {
    if (g.definition.display_name == "group=blue") blue = &g;
    if (g.definition.display_name == "group=orange") orange = &g;
  }
  REQUIRE(blue != nullptr);
  REQUIRE(orange != nullptr);
  CHECK(blue->size == 20000);
  CHECK(orange->size == 20000);

  // base rates 2/3 and 1/3 within Monte Carlo tolerance
  CHECK(double(blue->positive_count) / double(blue->size) == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(double(orange->positive_count) / double(orange->size) ==
        doctest::Approx(1.0 / 3.0).epsilon(0.02));

  // mirrored Beta laws share the same AUROC
  auto [blue_scores, blue_outcomes] = group_slice(data, *blue);
  auto [orange_scores, orange_outcomes] = group_slice(data, *orange);
  auto auroc_blue = auroc(blue_scores, blue_outcomes);
  auto auroc_orange = auroc(orange_scores, orange_outcomes);
  REQUIRE(auroc_blue.has_value());
  REQUIRE(auroc_orange.has_value());
  CHECK(*auroc_blue == doctest::Approx(*auroc_orange).epsilon(0.02));

  SUBCASE("deterministic under a fixed seed") {
    Dataset again = generate_two_group_example(200, 8);
    Dataset other = generate_two_group_example(200, 9);
    Dataset repeat = generate_two_group_example(200, 8);
    CHECK(again.score(0) == repeat.score(0));
    CHECK(again.score(0) != other.score(0));
  }
}
