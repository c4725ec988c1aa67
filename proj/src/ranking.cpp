#include "riskaudit/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace riskaudit {

namespace {

// Views over score-ascending data; owns sorted copies only when the input
// was unsorted (resampled blocks arrive sorted).
struct SortedTriple {
  std::vector<double> score_store;
  std::vector<std::uint8_t> outcome_store;
  std::vector<std::uint8_t> group_store;
  std::span<const double> scores;
  std::span<const std::uint8_t> outcomes;
  std::span<const std::uint8_t> in_group;
};

SortedTriple sort_triple(std::span<const double> scores, std::span<const std::uint8_t> outcomes,
                         std::span<const std::uint8_t> in_group) {
  if (scores.size() != outcomes.size() || scores.size() != in_group.size())
    throw std::invalid_argument("scores/outcomes/in_group length mismatch");
  SortedTriple t;
  if (std::is_sorted(scores.begin(), scores.end())) {
    t.scores = scores;
    t.outcomes = outcomes;
    t.in_group = in_group;
    return t;
  }
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });
  t.score_store.resize(scores.size());
  t.outcome_store.resize(scores.size());
  t.group_store.resize(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    t.score_store[i] = scores[order[i]];
    t.outcome_store[i] = outcomes[order[i]];
    t.group_store[i] = in_group[order[i]];
  }
  t.scores = t.score_store;
  t.outcomes = t.outcome_store;
  t.in_group = t.group_store;
  return t;
}

// Sweeps distinct thresholds from the top score down; at each threshold
// reports (tau, multiplicity of tau, selected count, selected in group).
template <typename Visit>
void sweep_selection(const SortedTriple& t, Visit&& visit) {
  const std::size_t n = t.scores.size();
  std::size_t selected = 0, selected_group = 0;
  std::size_t i = n;
  while (i > 0) {
    std::size_t j = i;
    while (j > 0 && t.scores[j - 1] == t.scores[i - 1]) --j;
    for (std::size_t k = j; k < i; ++k) {
      ++selected;
      selected_group += t.in_group[k];
    }
    visit(t.scores[i - 1], i - j, selected, selected_group);
    i = j;
  }
}

}  // namespace

std::optional<double> target_representation(std::span<const std::uint8_t> outcomes,
                                            std::span<const std::uint8_t> in_group) {
  if (outcomes.size() != in_group.size())
    throw std::invalid_argument("outcomes/in_group length mismatch");
  std::size_t pos = 0, pos_group = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    pos += outcomes[i];
    pos_group += outcomes[i] & in_group[i];
  }
  if (pos == 0) return std::nullopt;
  return double(pos_group) / double(pos);
}

std::optional<double> target_representation(const Dataset& dataset, const GroupIndex& group) {
  if (dataset.positive_count() == 0) return std::nullopt;
  return double(group.positive_count) / double(dataset.positive_count());
}

std::optional<CurveSeries> representation_curve(
    std::span<const double> scores, std::span<const std::uint8_t> outcomes,
    std::span<const std::uint8_t> in_group, std::optional<ThresholdRange> threshold_range) {
  auto target = target_representation(outcomes, in_group);
  if (!target || *target == 0.0) return std::nullopt;

  SortedTriple t = sort_triple(scores, outcomes, in_group);
  CurveSeries curve;
  curve.x_label = "decision threshold";
  curve.y_label = "normalized representation";
  sweep_selection(t, [&](double tau, std::size_t, std::size_t selected, std::size_t selected_group) {
    if (threshold_range && !threshold_range->contains(tau)) return;
    if (selected == 0) return;
    curve.x.push_back(tau);
    curve.y.push_back(double(selected_group) / double(selected) / *target);
  });
  // Sweep runs from high to low thresholds; present the curve x-ascending.
  std::reverse(curve.x.begin(), curve.x.end());
  std::reverse(curve.y.begin(), curve.y.end());
  return curve;
}

std::optional<CurveSeries> representation_curve(const Dataset& dataset, const GroupIndex& group,
                                                std::optional<ThresholdRange> threshold_range) {
  return representation_curve(dataset.scores(), dataset.outcomes(),
                              group_mask(dataset, group), threshold_range);
}

std::optional<EurValue> eur(std::span<const double> scores,
                            std::span<const std::uint8_t> outcomes,
                            std::span<const std::uint8_t> in_group,
                            std::optional<ThresholdRange> threshold_range) {
  auto target = target_representation(outcomes, in_group);
  if (!target || *target == 0.0) return std::nullopt;

  SortedTriple t = sort_triple(scores, outcomes, in_group);
  double sum = 0.0;
  std::size_t draws = 0, skipped = 0;
  sweep_selection(t, [&](double tau, std::size_t multiplicity, std::size_t selected,
                         std::size_t selected_group) {
    if (threshold_range && !threshold_range->contains(tau)) return;
    if (selected == 0) {
      skipped += multiplicity;
      return;
    }
    double ratio = double(selected_group) / double(selected) / *target;
    sum += double(multiplicity) * std::min(ratio, 1.0);
    draws += multiplicity;
  });
  if (draws == 0) return std::nullopt;
  return EurValue{sum / double(draws), skipped};
}

std::optional<EurValue> eur(const Dataset& dataset, const GroupIndex& group,
                            std::optional<ThresholdRange> threshold_range) {
  return eur(dataset.scores(), dataset.outcomes(), group_mask(dataset, group), threshold_range);
}

}  // namespace riskaudit
