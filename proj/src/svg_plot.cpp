#include "minimax/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace minimax {

namespace {

constexpr int kWidth = 760, kHeight = 520;
constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

struct Box {
  double xmin, xmax, ymin, ymax;  // in log10 space
  double px(double logx) const {
    return kLeft + (logx - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  }
  double py(double logy) const {
    return kHeight - kBottom -
           (logy - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace

std::string render_loglog_svg(const std::string& title,
                              const std::vector<PlotSeries>& series,
                              const std::vector<PlotCurve>& curves) {
  Box box{1e300, -1e300, 1e300, -1e300};
  auto grow = [&](double n, double r) {
    if (!(n > 0.0) || !(r > 0.0)) return;
    box.xmin = std::min(box.xmin, std::log10(n));
    box.xmax = std::max(box.xmax, std::log10(n));
    box.ymin = std::min(box.ymin, std::log10(r));
    box.ymax = std::max(box.ymax, std::log10(r));
  };
  for (const auto& s : series)
    for (const auto& [n, r] : s.points) grow(n, r);
  for (const auto& c : curves)
    for (const auto& [n, r] : c.points) grow(n, r);
  if (box.xmin > box.xmax) {
    box = {1.0, 4.0, -3.0, 0.0};
  }
  box.xmin -= 0.05;
  box.xmax += 0.05;
  const double pad = 0.08 * (box.ymax - box.ymin + 0.1);
  box.ymin -= pad;
  box.ymax += pad;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";

  // axes and decade ticks
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int e = static_cast<int>(std::ceil(box.xmin));
       e <= static_cast<int>(std::floor(box.xmax)); ++e) {
    const double px = box.px(e);
    out << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px
        << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e"
        << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(box.ymin));
       e <= static_cast<int>(std::floor(box.ymax)); ++e) {
    const double py = box.py(e);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << py << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e"
        << e << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
      << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">n</text>\n";
  out << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">L2 risk</text>\n";

  int color = 0;
  int legend_y = kTop + 12;
  auto legend = [&](const std::string& label, const std::string& col,
                    bool dashed) {
    out << "<line x1=\"" << kWidth - 245 << "\" y1=\"" << legend_y
        << "\" x2=\"" << kWidth - 225 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << col << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    out << "<text x=\"" << kWidth - 220 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << label
        << "</text>\n";
    legend_y += 16;
  };

  for (const auto& c : curves) {
    const std::string col = "#999";
    out << "<polyline fill=\"none\" stroke=\"" << col
        << "\" stroke-dasharray=\"5,3\" points=\"";
    for (const auto& [n, r] : c.points)
      if (n > 0 && r > 0)
        out << box.px(std::log10(n)) << ',' << box.py(std::log10(r)) << ' ';
    out << "\"/>\n";
    legend(c.label, col, true);
  }

  for (const auto& s : series) {
    const std::string col = kColors[color++ % 6];
    for (const auto& [n, r] : s.points) {
      if (!(n > 0 && r > 0)) continue;
      out << "<circle cx=\"" << box.px(std::log10(n)) << "\" cy=\""
          << box.py(std::log10(r)) << "\" r=\"3.5\" fill=\"" << col
          << "\"/>\n";
    }
    if (s.has_fit && !s.points.empty()) {
      const double n0 = s.points.front().first, n1 = s.points.back().first;
      const double r0 = std::exp(s.intercept + s.slope * std::log(n0));
      const double r1 = std::exp(s.intercept + s.slope * std::log(n1));
      out << "<line x1=\"" << box.px(std::log10(n0)) << "\" y1=\""
          << box.py(std::log10(r0)) << "\" x2=\"" << box.px(std::log10(n1))
          << "\" y2=\"" << box.py(std::log10(r1)) << "\" stroke=\"" << col
          << "\" stroke-width=\"2\"/>\n";
      legend(s.label + " (slope " + fmt(s.slope) + ")", col, false);
    } else {
      legend(s.label, col, false);
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace minimax
