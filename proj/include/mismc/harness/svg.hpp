#pragma once

#include <string>
#include <vector>

namespace mismc {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), raw scale
  bool has_fit = false;
  double fit_slope = 0.0;      // in log10-log10 coordinates == log2-log2 slope
  double fit_intercept = 0.0;  // log2 intercept paired with log2 slope
};

// Minimal static log-log scatter/line plot; series get distinct colors and a
// legend with the fitted slope when present.
std::string render_loglog_svg(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series);

}  // namespace mismc
