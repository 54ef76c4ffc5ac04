#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nsdi {

struct SvgStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> markers;  // vertical lines at these x values
  int width = 640;
  int height = 420;
};

/// Line plot of the first two columns of a CSV text. '#' lines and a
/// non-numeric header row are skipped; rows with an empty second field are
/// treated as gaps. Throws std::invalid_argument for fewer than two plotted
/// rows or for a non-numeric data field. Output has no timestamps, so equal
/// inputs give byte-identical SVG.
std::string render_svg(std::string_view csv_content, const SvgStyle& style);

}  // namespace nsdi
