#pragma once

#include <string>
#include <utility>
#include <vector>

namespace vig {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;  // -1 when absent
};

// Plain comma-separated text, no quoting.
CsvTable parse_csv(const std::string& text);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool line = false;
};

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series);

struct SvgFile {
  std::string name;
  std::string svg;
};

// experiment_a / experiment_b tables get one plot per objective; anything else is a scatter of the
// numeric columns against the first numeric column.
std::vector<SvgFile> plot_csv(const std::string& stem, const std::string& text);

}  // namespace vig
