#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covertkit::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Self-contained line chart (no external assets); NaN y-values break the
/// polyline so failed sweep points appear as gaps.
void write_line_chart(std::ostream& out, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, int width = 720, int height = 480);

}  // namespace covertkit::svg
