#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "riskaudit/curve.hpp"
#include "riskaudit/dataset.hpp"

namespace riskaudit {

/// Restriction of the decision-threshold sweep; defaults to the full score
/// support when absent.
struct ThresholdRange {
  double min;
  double max;
  bool contains(double t) const { return t >= min && t <= max; }
};

/// Fraction of all positive-outcome subjects that belong to the group:
/// the target representation the selected set is compared against.
/// Undefined when the data holds no positives at all.
std::optional<double> target_representation(std::span<const std::uint8_t> outcomes,
                                            std::span<const std::uint8_t> in_group);
std::optional<double> target_representation(const Dataset& dataset, const GroupIndex& group);

/// Normalized representation ratio of the group as a function of the
/// decision threshold: share of the group among the selected (score >= tau)
/// divided by its target representation. Thresholds are the distinct score
/// values (restricted to threshold_range when given); thresholds that
/// select nobody are omitted. Undefined when the group (or the whole
/// sample) has no positives.
std::optional<CurveSeries> representation_curve(std::span<const double> scores,
                                                std::span<const std::uint8_t> outcomes,
                                                std::span<const std::uint8_t> in_group,
                                                std::optional<ThresholdRange> threshold_range = {});
std::optional<CurveSeries> representation_curve(const Dataset& dataset, const GroupIndex& group,
                                                std::optional<ThresholdRange> threshold_range = {});

struct EurValue {
  double value = 0.0;
  std::size_t skipped_draws = 0;  // draws whose selection was empty
};

/// Expected under-representation: every sample's score is one threshold
/// draw (so the expectation runs over the empirical score distribution,
/// duplicates included), and each draw contributes the representation
/// ratio capped at 1. When a threshold_range is given, draws outside the
/// range are excluded and the weights renormalized. 1 means the group is
/// never under-represented. Undefined when the group has no positives.
std::optional<EurValue> eur(std::span<const double> scores,
                            std::span<const std::uint8_t> outcomes,
                            std::span<const std::uint8_t> in_group,
                            std::optional<ThresholdRange> threshold_range = {});
std::optional<EurValue> eur(const Dataset& dataset, const GroupIndex& group,
                            std::optional<ThresholdRange> threshold_range = {});

}  // namespace riskaudit
