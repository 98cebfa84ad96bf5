#include "qmc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmc/output.hpp"

namespace qmc {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : spec.series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad_y = 0.05 * (y1 - y0);
  y0 -= pad_y;
  y1 += pad_y;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double w = spec.width - left - right;
  const double h = spec.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(top + h + 16)
       << "\" text-anchor=\"middle\">" << fmt(std::round(xv * 1000) / 1000) << "</text>\n";
    os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">"
       << fmt(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  os << "<text x=\"" << fmt(left + w / 2) << "\" y=\"" << spec.height - 12
     << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(top + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt(top + h / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  for (const auto& [xv, label] : spec.x_marks) {
    if (xv < x0 || xv > x1) continue;
    os << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << top << "\" x2=\"" << fmt(px(xv)) << "\" y2=\""
       << fmt(top + h) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << fmt(px(xv) + 3) << "\" y=\"" << fmt(top + 12) << "\" fill=\"#666\">"
       << escape(label) << "</text>\n";
  }

  double legend_y = top + 14;
  for (const auto& s : spec.series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    os << "\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
        os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
           << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    if (!s.label.empty()) {
      os << "<text x=\"" << fmt(left + w - 8) << "\" y=\"" << fmt(legend_y) << "\" text-anchor=\"end\" fill=\""
         << s.color << "\">" << escape(s.label) << "</text>\n";
      legend_y += 14;
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qmc
