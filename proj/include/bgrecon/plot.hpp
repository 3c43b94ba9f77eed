#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bgrecon {

/// One polyline: x from column 0 of a CSV file, y from `column`.
struct PlotSeries {
  std::string label;
  std::filesystem::path csv;
  int column = 1;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// SVG text for the series on a fixed 800×500 canvas. Output depends only on
/// the inputs (no timestamps, fixed number formatting). Rows whose cells do not
/// parse as numbers are skipped, as are non-positive values on a log axis.
/// Throws std::invalid_argument for an empty series list and std::runtime_error
/// for a missing or unreadable CSV.
std::string render_plot(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

/// render_plot written to `out`; throws std::runtime_error if it cannot be written.
void emit_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& out,
               const PlotOptions& options = {});

}  // namespace bgrecon
