#pragma once

#include <string>
#include <vector>

namespace spindle {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#000000";
  bool dashed = false;
};

// Minimal self-contained SVG line plot: axes, ticks, legend, one polyline per
// series. No external assets; numbers are formatted with format_value so the
// file is byte-stable for identical inputs.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

}  // namespace spindle
