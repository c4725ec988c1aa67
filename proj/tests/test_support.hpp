#pragma once

#include <cstdint>
#include <vector>

#include "riskaudit/rng.hpp"

namespace testsup {

struct Instance {
  std::vector<double> scores;
  std::vector<std::uint8_t> outcomes;
};

// Random test instance: scores uniform (optionally snapped to a coarse
// grid to force ties), outcomes Bernoulli with probability tied to the
// score half the time (informative) and 0.5 otherwise (noise).
inline Instance random_instance(riskaudit::StreamRng& rng, std::size_t n, bool heavy_ties,
                                bool informative) {
  Instance inst;
  inst.scores.reserve(n);
  inst.outcomes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rng.next_double();
    if (heavy_ties) s = double(static_cast<int>(s * 8)) / 8.0;
    double p = informative ? s : 0.5;
    inst.scores.push_back(s);
    inst.outcomes.push_back(rng.next_bernoulli(p) ? 1 : 0);
  }
  return inst;
}

// Instance with a fixed positive count (base-rate control).
inline Instance fixed_rate_instance(riskaudit::StreamRng& rng, std::size_t n, double base_rate) {
  Instance inst;
  std::size_t n_pos = static_cast<std::size_t>(base_rate * double(n));
  for (std::size_t i = 0; i < n; ++i) {
    inst.scores.push_back(rng.next_double());
    inst.outcomes.push_back(i < n_pos ? 1 : 0);
  }
  // shuffle outcomes against scores
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.next_index(i);
    std::swap(inst.outcomes[i - 1], inst.outcomes[j]);
  }
  return inst;
}

}  // namespace testsup
