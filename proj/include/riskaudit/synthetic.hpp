#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskaudit/calibration.hpp"
#include "riskaudit/dataset.hpp"

namespace riskaudit {

/// Synthetic calibration scenarios: scores uniform on [0,1]; the true risk
/// is the score itself (Perfect) or its square (Square).
enum class Scenario { Perfect, Square };

const char* scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(const std::string& name);

struct CalibrationStream {
  std::vector<double> scores;
  std::vector<std::uint8_t> outcomes;
};

/// Draws n (score, outcome) pairs: R ~ U(0,1), rho = R or R^2,
/// Y ~ Bernoulli(rho). Deterministic given the seed.
CalibrationStream generate_calibration_stream(std::size_t n, Scenario scenario,
                                              std::uint64_t seed);

struct GroundTruth {
  double ece;
  double rmsce;
};

/// Analytic calibration errors of the scenarios: Perfect -> (0, 0);
/// Square -> (E|R - R^2|, sqrt(E[(R - R^2)^2])) = (1/6, sqrt(1/30)).
GroundTruth ground_truth_errors(Scenario scenario);

/// Sample-size bias study: a full factorial over metric configurations,
/// scenarios and sample sizes, each repeated n_repetitions times with
/// independent derived seeds.
struct BiasStudyConfig {
  std::vector<std::size_t> sample_sizes = {100, 1000, 10000};
  int n_repetitions = 100;
  std::vector<Scenario> scenarios = {Scenario::Perfect, Scenario::Square};
  std::vector<CalibrationEstimatorConfig> metrics;  // empty -> default panel
  std::uint64_t seed = 0;
};

struct BiasStudyCell {
  std::string metric_label;
  Scenario scenario;
  std::size_t sample_size;
  std::vector<std::optional<double>> values;  // one per repetition; nullopt = inapplicable

  double median_of_defined() const;  // NaN when no repetition was defined
};

struct BiasStudyResult {
  std::vector<BiasStudyCell> cells;
  GroundTruth perfect_truth;
  GroundTruth square_truth;
};

BiasStudyResult run_bias_study(const BiasStudyConfig& config);

/// The default metric lineup of the bias study: fixed 15-bin ECE/ACE and
/// debiased RMSCE in both binning schemes, each also with the adaptive bin
/// count search; "drmsce" is the equal-mass debiased searched variant.
std::vector<CalibrationEstimatorConfig> default_bias_metric_panel();

/// Two equally sized groups whose true risks follow mirrored Beta laws,
/// Beta(4,2) for "blue" (base rate 2/3) and Beta(2,4) for "orange" (base
/// rate 1/3); the model reports the true risk, so it is perfectly
/// calibrated in both groups and the groups share the same AUROC by
/// symmetry, yet their score distributions differ. Attribute "group"
/// carries the membership.
Dataset generate_two_group_example(std::size_t n_per_group, std::uint64_t seed);

}  // namespace riskaudit
