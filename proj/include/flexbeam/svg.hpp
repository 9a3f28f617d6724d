#pragma once

#include <string>
#include <vector>

namespace flexbeam {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x, y;
};

// Minimal standalone SVG line chart; enough to eyeball input and tip traces
// without a plotting stack.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

}  // namespace flexbeam
