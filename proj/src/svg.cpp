#include "mismc/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mismc {

namespace {

const char* kPalette[] = {"#4363d8", "#e6194b", "#f5a623", "#3cb44b",
                          "#911eb4", "#4699c9", "#808000", "#000075"};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string sci_label(double log10v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "1e%.0f", log10v);
  return buf;
}

}  // namespace

std::string render_loglog_svg(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series) {
  const double w = 760, h = 540;
  const double ml = 80, mr = 200, mt = 50, mb = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-9) xmax = xmin + 1;
  if (ymax - ymin < 1e-9) ymax = ymin + 1;
  const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;

  auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double ly) { return h - mb - (ly - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"28\" font-size=\"17\" "
         "text-anchor=\"middle\" font-family=\"sans-serif\">"
      << title << "</text>\n";

  // Axes box and integer-decade ticks.
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr)
      << "\" height=\"" << (h - mt - mb)
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    svg << "<line x1=\"" << num(px(d)) << "\" y1=\"" << num(py(ymin)) << "\" x2=\""
        << num(px(d)) << "\" y2=\"" << num(py(ymax))
        << "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
    svg << "<text x=\"" << num(px(d)) << "\" y=\"" << num(h - mb + 18)
        << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << sci_label(d) << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    svg << "<line x1=\"" << num(px(xmin)) << "\" y1=\"" << num(py(d)) << "\" x2=\""
        << num(px(xmax)) << "\" y2=\"" << num(py(d))
        << "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
    svg << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py(d) + 4)
        << "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">"
        << sci_label(d) << "</text>\n";
  }
  svg << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (h - 16)
      << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">"
      << x_label << "</text>\n";
  svg << "<text x=\"22\" y=\"" << (mt + (h - mt - mb) / 2)
      << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 22 "
      << (mt + (h - mt - mb) / 2) << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::ostringstream path;
    bool first = true;
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      path << (first ? "M" : "L") << num(px(std::log10(x))) << " "
           << num(py(std::log10(y))) << " ";
      first = false;
    }
    svg << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      svg << "<circle cx=\"" << num(px(std::log10(x))) << "\" cy=\""
          << num(py(std::log10(y))) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    if (s.has_fit && !s.points.empty()) {
      // Fit stored in log2 coordinates; a line in log2 space is the same
      // line in log10 space.
      const double lx0 = xmin + 0.02 * (xmax - xmin);
      const double lx1 = xmax - 0.02 * (xmax - xmin);
      auto fit_y10 = [&](double x10) {
        const double x2 = x10 * std::log2(10.0);
        const double y2 = s.fit_intercept + s.fit_slope * x2;
        return y2 * std::log10(2.0);
      };
      svg << "<line x1=\"" << num(px(lx0)) << "\" y1=\"" << num(py(fit_y10(lx0)))
          << "\" x2=\"" << num(px(lx1)) << "\" y2=\"" << num(py(fit_y10(lx1)))
          << "\" stroke=\"" << color
          << "\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
    }
    const double ly = mt + 18 + 22 * static_cast<double>(si);
    svg << "<line x1=\"" << (w - mr + 14) << "\" y1=\"" << ly << "\" x2=\""
        << (w - mr + 44) << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    std::string label = s.label;
    if (s.has_fit) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " (slope %.3f)", s.fit_slope);
      label += buf;
    }
    svg << "<text x=\"" << (w - mr + 50) << "\" y=\"" << (ly + 4)
        << "\" font-size=\"13\" font-family=\"sans-serif\">" << label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mismc
