#pragma once

// Minimal static SVG line/scatter charts for quick looks at sweeps.

#include <string>
#include <vector>

namespace qmc {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool markers = true;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::vector<std::pair<double, std::string>> x_marks;  // vertical annotation lines
  int width = 640;
  int height = 400;
};

std::string render_svg(const PlotSpec& spec);

}  // namespace qmc
