#pragma once

#include <string>
#include <vector>

namespace acci {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

// A static SVG line chart.
std::string line_chart_svg(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                           const std::string& y_label);

// Reads a CSV with a header row; column `x` against each of `ys`.
std::vector<Series> series_from_csv(const std::string& csv, const std::string& x, const std::vector<std::string>& ys);

}  // namespace acci
