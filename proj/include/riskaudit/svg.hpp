#pragma once

#include <string>

#include "riskaudit/curve.hpp"

namespace riskaudit {

/// Renders a curve (with its confidence band, when present) as a small
/// standalone SVG: band polygon, center polyline, axis frame and tick
/// labels. Convenience output; the curve files are the contract.
std::string render_curve_svg(const CurveSeries& curve, const std::string& title);

void render_curve_file(const std::string& curve_csv_path, const std::string& svg_path,
                       const std::string& title);

}  // namespace riskaudit
