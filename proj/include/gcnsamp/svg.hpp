#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gcnsamp/csv.hpp"

namespace gcnsamp {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // drawn in the given order
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 640;
  int height = 420;
};

/// Line chart with axes, five ticks per axis and a legend. Output depends only
/// on the chart contents. Throws ConfigError when there is nothing to draw or a
/// coordinate is not finite.
std::string render_svg(const SvgChart& chart);

/// One series per distinct value of the `series` columns (joined with " / ").
/// Non-numeric x values are placed at 1, 2, ... in order of appearance.
SvgChart chart_from_table(const CsvTable& table, const std::string& x_column, const std::string& y_column,
                          const std::vector<std::string>& series_columns, const std::string& title);

}  // namespace gcnsamp
