#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "riskaudit/curve.hpp"

namespace riskaudit {

/// ROC staircase over all distinct score thresholds with the decision rule
/// "select iff score >= tau", including the (0,0) and (1,1) endpoints.
/// Tied scores collapse into a single sweep step. Undefined (nullopt) when
/// only one outcome class is present.
std::optional<CurveSeries> roc_curve(std::span<const double> scores,
                                     std::span<const std::uint8_t> outcomes);

/// AUROC as the concordance statistic with midrank tie handling: ties
/// between a positive and a negative count one half. Undefined for
/// single-class inputs.
std::optional<double> auroc(std::span<const double> scores,
                            std::span<const std::uint8_t> outcomes);

/// Precision-recall-gain curve: at each sweep step,
///   precision-gain = (prec - pi) / ((1 - pi) * prec)
///   recall-gain    = (rec  - pi) / ((1 - pi) * rec)
/// with pi the base rate. Only points with recall-gain >= 0 are emitted,
/// ordered by recall-gain; the "select all" point (1, 0) is always present.
/// Undefined for single-class inputs.
std::optional<CurveSeries> prg_curve(std::span<const double> scores,
                                     std::span<const std::uint8_t> outcomes);

/// Trapezoidal area under the PRG operating-point polyline restricted to
/// recall-gain in [0,1]: the segment crossing zero recall gain is clipped
/// (flat extension when the sweep starts inside the range), so a perfect
/// ranking scores exactly 1 and a degenerate single-point curve scores 0.
/// The area may be negative for worse-than-baseline rankings. Undefined
/// for single-class inputs.
std::optional<double> auprg(std::span<const double> scores,
                            std::span<const std::uint8_t> outcomes);

/// Trapezoidal area under an x-sorted curve (used to relate the ROC
/// staircase to AUROC and to integrate PRG curves).
double trapezoid_area(const CurveSeries& curve);

}  // namespace riskaudit
