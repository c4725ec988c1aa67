#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace riskaudit {

/// An ordered series of (x, y) points with optional pointwise confidence
/// bands. Used for reliability, ROC, PRG and representation curves as well
/// as score histograms.
struct CurveSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lower;  // empty unless bands were attached
  std::vector<double> upper;
  std::string x_label;
  std::string y_label;

  bool has_bands() const { return !lower.empty(); }
  std::size_t size() const { return x.size(); }
};

}  // namespace riskaudit
