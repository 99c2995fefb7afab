#pragma once

#include <string>
#include <utility>
#include <vector>

namespace minimax {

// minimal self-contained SVG log-log chart: measured points with fitted
// lines plus dashed reference curves
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (n, risk)
  bool has_fit = false;
  double slope = 0.0;
  double intercept = 0.0;  // ln-scale intercept
};

struct PlotCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

std::string render_loglog_svg(const std::string& title,
                              const std::vector<PlotSeries>& series,
                              const std::vector<PlotCurve>& curves);

}  // namespace minimax
