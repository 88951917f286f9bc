#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace arc {

struct PlotSeries {
  std::string label;
  std::vector<double> y;
  std::string color{"#1f77b4"};
  bool dashed{false};
};

struct PlotBand {
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color{"#d62728"};
};

// Minimal self-contained line chart: series share the x axis; an optional
// shaded band is drawn underneath.
std::string render_line_plot(const std::string& title, const std::vector<double>& x,
                             const std::vector<PlotSeries>& series, const PlotBand* band = nullptr,
                             int width = 900, int height = 420);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace arc
