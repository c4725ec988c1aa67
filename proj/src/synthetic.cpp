#include "riskaudit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskaudit/rng.hpp"

namespace riskaudit {

const char* scenario_name(Scenario s) {
  return s == Scenario::Perfect ? "perfect" : "square";
}

std::optional<Scenario> parse_scenario(const std::string& name) {
  if (name == "perfect") return Scenario::Perfect;
  if (name == "square") return Scenario::Square;
  return std::nullopt;
}

CalibrationStream generate_calibration_stream(std::size_t n, Scenario scenario,
                                              std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  StreamRng rng(seed);
  CalibrationStream stream;
  stream.scores.reserve(n);
  stream.outcomes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r = rng.next_double();
    double rho = scenario == Scenario::Perfect ? r : r * r;
    stream.scores.push_back(r);
    stream.outcomes.push_back(rng.next_bernoulli(rho) ? 1 : 0);
  }
  return stream;
}

GroundTruth ground_truth_errors(Scenario scenario) {
  if (scenario == Scenario::Perfect) return {0.0, 0.0};
  // integral of r - r^2 over [0,1] and of (r - r^2)^2 over [0,1]
  return {1.0 / 6.0, std::sqrt(1.0 / 30.0)};
}

double BiasStudyCell::median_of_defined() const {
  std::vector<double> defined;
  for (const auto& v : values)
    if (v) defined.push_back(*v);
  if (defined.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(defined.begin(), defined.end());
  std::size_t m = defined.size();
  return m % 2 == 1 ? defined[m / 2] : 0.5 * (defined[m / 2 - 1] + defined[m / 2]);
}

std::vector<CalibrationEstimatorConfig> default_bias_metric_panel() {
  using E = CalibrationEstimator;
  using B = BinningScheme;
  return {
      {"ece_15", B::EqualWidth, E::EceL1, BinPolicy::fixed(15)},
      {"ace_15", B::EqualMass, E::EceL1, BinPolicy::fixed(15)},
      {"ece_bcs", B::EqualWidth, E::EceL1, BinPolicy::adaptive()},
      {"ace_bcs", B::EqualMass, E::EceL1, BinPolicy::adaptive()},
      {"debiased_rmsce_ew_15", B::EqualWidth, E::DebiasedRmsce, BinPolicy::fixed(15)},
      {"debiased_rmsce_em_15", B::EqualMass, E::DebiasedRmsce, BinPolicy::fixed(15)},
      {"drmsce", B::EqualMass, E::DebiasedRmsce, BinPolicy::adaptive()},
  };
}

BiasStudyResult run_bias_study(const BiasStudyConfig& config) {
  if (config.n_repetitions < 1) throw std::invalid_argument("n_repetitions must be >= 1");
  if (config.sample_sizes.empty()) throw std::invalid_argument("no sample sizes given");

  const auto metrics =
      config.metrics.empty() ? default_bias_metric_panel() : config.metrics;

  BiasStudyResult result;
  result.perfect_truth = ground_truth_errors(Scenario::Perfect);
  result.square_truth = ground_truth_errors(Scenario::Square);

  for (Scenario scenario : config.scenarios) {
    for (std::size_t n : config.sample_sizes) {
      // One stream per (scenario, size, repetition); every metric sees the
      // same repetition stream, as in a paired comparison.
      std::vector<CalibrationStream> streams;
      streams.reserve(config.n_repetitions);
      for (int rep = 0; rep < config.n_repetitions; ++rep) {
        std::uint64_t cell_seed = mix64(config.seed, fnv1a64(scenario_name(scenario)),
                                        mix64(n, static_cast<std::uint64_t>(rep)));
        streams.push_back(generate_calibration_stream(n, scenario, cell_seed));
      }
      for (const auto& metric : metrics) {
        BiasStudyCell cell;
        cell.metric_label = metric.label;
        cell.scenario = scenario;
        cell.sample_size = n;
        cell.values.reserve(config.n_repetitions);
        for (const auto& stream : streams)
          cell.values.push_back(evaluate_calibration(metric, stream.scores, stream.outcomes).value);
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

namespace {

// Gamma(k) for small integer k as a sum of exponentials; exact given the
// stream, no library distribution involved.
double gamma_integer(StreamRng& rng, int k) {
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    double u = rng.next_double();
    // next_double is in [0,1); shift away from 0 for the log
    acc -= std::log(1.0 - u);
  }
  return acc;
}

double beta_integer(StreamRng& rng, int alpha, int beta) {
  double a = gamma_integer(rng, alpha);
  double b = gamma_integer(rng, beta);
  return a / (a + b);
}

}  // namespace

Dataset generate_two_group_example(std::size_t n_per_group, std::uint64_t seed) {
  if (n_per_group < 1) throw std::invalid_argument("n_per_group must be >= 1");
  StreamRng rng(mix64(seed, fnv1a64("two-group-example")));

  std::vector<double> scores;
  std::vector<std::uint8_t> outcomes;
  std::vector<std::uint32_t> group_codes;
  scores.reserve(2 * n_per_group);
  outcomes.reserve(2 * n_per_group);
  group_codes.reserve(2 * n_per_group);

  for (std::size_t g = 0; g < 2; ++g) {
    const int alpha = g == 0 ? 4 : 2;
    const int beta = g == 0 ? 2 : 4;
    for (std::size_t i = 0; i < n_per_group; ++i) {
      double rho = beta_integer(rng, alpha, beta);
      scores.push_back(rho);  // the model reports the true risk
      outcomes.push_back(rng.next_bernoulli(rho) ? 1 : 0);
      group_codes.push_back(static_cast<std::uint32_t>(g));
    }
  }

  AttributeSchema schema{{"group", {"blue", "orange"}}};
  return Dataset(std::move(scores), std::move(outcomes), {std::move(group_codes)},
                 std::move(schema));
}

}  // namespace riskaudit
