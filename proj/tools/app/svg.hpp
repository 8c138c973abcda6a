#pragma once

// Minimal static line plots. Convenience output only; the CSVs are the data.

#include <filesystem>
#include <string>
#include <vector>

namespace multiac::app {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a polyline
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

void write_svg(const std::filesystem::path& path, const Plot& plot);

}  // namespace multiac::app
