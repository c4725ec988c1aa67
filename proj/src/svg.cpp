#include "riskaudit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "riskaudit/audit.hpp"

namespace riskaudit {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kMarginLeft = 64, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 48;

struct Extent {
  double lo = 0, hi = 1;
  double map(double v, double pixel_lo, double pixel_hi) const {
    double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }
};

Extent extent_of(const std::vector<double>& values, const std::vector<double>& more) {
  Extent e{1e300, -1e300};
  auto take = [&](double v) {
    if (std::isnan(v)) return;
    e.lo = std::min(e.lo, v);
    e.hi = std::max(e.hi, v);
  };
  for (double v : values) take(v);
  for (double v : more) take(v);
  if (e.lo > e.hi) return {0, 1};
  if (e.lo == e.hi) {
    e.lo -= 0.5;
    e.hi += 0.5;
  }
  return e;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

}  // namespace

std::string render_curve_svg(const CurveSeries& curve, const std::string& title) {
  if (curve.size() == 0) throw std::runtime_error("cannot render an empty curve");

  Extent ex = extent_of(curve.x, {});
  Extent ey = extent_of(curve.y, curve.lower);
  ey = extent_of(curve.y, curve.upper.empty() ? std::vector<double>{ey.lo, ey.hi}
                                              : curve.upper);
  ey = extent_of({ey.lo, ey.hi}, curve.lower);

  auto px = [&](double x) { return ex.map(x, kMarginLeft, kWidth - kMarginRight); };
  auto py = [&](double y) { return ey.map(y, kHeight - kMarginBottom, kMarginTop); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  if (curve.has_bands()) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (std::isnan(curve.lower[i])) continue;
      pts << px(curve.x[i]) << ',' << py(curve.lower[i]) << ' ';
    }
    for (std::size_t i = curve.size(); i-- > 0;) {
      if (std::isnan(curve.upper[i])) continue;
      pts << px(curve.x[i]) << ',' << py(curve.upper[i]) << ' ';
    }
    svg << "<polygon points=\"" << pts.str() << "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" "
           "stroke=\"none\"/>\n";
  }

  std::ostringstream line;
  bool pen_down = false;
  svg << "<g fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\">\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (std::isnan(curve.y[i])) {
      if (pen_down) svg << "<polyline points=\"" << line.str() << "\"/>\n";
      line.str("");
      pen_down = false;
      continue;
    }
    line << px(curve.x[i]) << ',' << py(curve.y[i]) << ' ';
    pen_down = true;
  }
  if (pen_down) svg << "<polyline points=\"" << line.str() << "\"/>\n";
  svg << "</g>\n";

  // axis frame and corner ticks
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << kWidth - kMarginLeft - kMarginRight << "\" height=\""
      << kHeight - kMarginTop - kMarginBottom
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - kMarginBottom + 18
      << "\" font-size=\"12\">" << fmt(ex.lo) << "</text>\n";
  svg << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kHeight - kMarginBottom + 18
      << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(ex.hi) << "</text>\n";
  svg << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kHeight - kMarginBottom
      << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(ey.lo) << "</text>\n";
  svg << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kMarginTop + 12
      << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(ey.hi) << "</text>\n";
  svg << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\""
      << kHeight - 12 << "\" text-anchor=\"middle\" font-size=\"13\">" << curve.x_label
      << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" font-size=\"13\" transform=\"rotate(-90 16 " << kHeight / 2 << ")\" "
         "text-anchor=\"middle\">"
      << curve.y_label << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void render_curve_file(const std::string& curve_csv_path, const std::string& svg_path,
                       const std::string& title) {
  CurveSeries curve = read_curve_file(curve_csv_path);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + svg_path);
  out << render_curve_svg(curve, title);
}

}  // namespace riskaudit
