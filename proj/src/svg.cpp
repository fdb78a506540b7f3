#include "spindle/svg.hpp"

#include "spindle/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spindle {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 780.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 460.0;

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// A short tick label; trims the trailing zeros %.10g would keep for values
// like 0.2500000000.
std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
  if (series.empty()) throw std::invalid_argument("write_svg_plot: no series");
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("write_svg_plot: series x/y length mismatch");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const auto px = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  const auto py = [&](double y) {
    return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"28\" font-size=\"18\" "
      << "font-family=\"sans-serif\" text-anchor=\"middle\">" << escape_xml(title)
      << "</text>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1=\"" << format_value(px(fx)) << "\" y1=\"" << kTop << "\" x2=\""
        << format_value(px(fx)) << "\" y2=\"" << kBottom
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << format_value(py(fy)) << "\" x2=\""
        << kRight << "\" y2=\"" << format_value(py(fy))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << format_value(px(fx)) << "\" y=\"" << kBottom + 20
        << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">"
        << tick_label(fx) << "</text>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << format_value(py(fy) + 4)
        << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">"
        << tick_label(fy) << "</text>\n";
  }
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
      << "\" y2=\"" << kBottom << "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kBottom << "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\">"
      << escape_xml(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
      << "\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18 " << (kTop + kBottom) / 2 << ")\">"
      << escape_xml(y_label) << "</text>\n";

  for (const auto& s : series) {
    if (s.x.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << " points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (i) svg << ' ';
      svg << format_value(px(s.x[i])) << ',' << format_value(py(s.y[i]));
    }
    svg << "\"/>\n";
  }

  double legend_y = kTop + 14.0;
  for (const auto& s : series) {
    svg << "<line x1=\"" << kRight - 180 << "\" y1=\"" << format_value(legend_y - 4)
        << "\" x2=\"" << kRight - 150 << "\" y2=\"" << format_value(legend_y - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << "/>\n";
    svg << "<text x=\"" << kRight - 144 << "\" y=\"" << format_value(legend_y)
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << escape_xml(s.label)
        << "</text>\n";
    legend_y += 18.0;
  }
  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

}  // namespace spindle
