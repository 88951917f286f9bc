#include "arc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace arc {

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

std::string render_line_plot(const std::string& title, const std::vector<double>& x,
                             const std::vector<PlotSeries>& series, const PlotBand* band,
                             int width, int height) {
  const double left = 70, right = 160, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_lo = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double x_hi = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  const auto extend = [&](const std::vector<double>& v) {
    for (double y : v) {
      if (!std::isfinite(y)) continue;
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  };
  for (const auto& s : series) extend(s.y);
  if (band) {
    extend(band->lower);
    extend(band->upper);
  }
  if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
  if (y_hi - y_lo < 1e-9) y_lo -= 1.0, y_hi += 1.0;
  if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"#888\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv
        << "</text>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << xv << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">time (s)</text>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\">RPM</text>\n";

  if (band && band->lower.size() == x.size() && band->upper.size() == x.size() && !x.empty()) {
    svg << "<polygon fill=\"" << band->color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) svg << px(x[i]) << ',' << py(band->upper[i]) << ' ';
    for (std::size_t i = x.size(); i-- > 0;) svg << px(x[i]) << ',' << py(band->lower[i]) << ' ';
    svg << "\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    svg << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\""
        << (ser.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < std::min(x.size(), ser.y.size()); ++i) {
      if (std::isfinite(ser.y[i])) svg << px(x[i]) << ',' << py(ser.y[i]) << ' ';
    }
    svg << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << left + plot_w + 36 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << ser.color
        << "\" stroke-width=\"2\"" << (ser.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    svg << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << ly << "\">" << escape(ser.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace arc
