#pragma once

// Flat-file emitters: CSV with 17-significant-digit scientific floats, and
// standalone SVG line plots.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rayleigh::output {

/// "%.16e": 17 significant digits, round-trips every double.
std::string format_double(double value);

/// Shortest decimal form that round-trips (used for directory names).
std::string format_short(double value);

class CsvWriter {
 public:
  /// Creates parent directories; throws std::runtime_error if the file cannot
  /// be opened.
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  /// Row whose first column is an integer index.
  void row(long long index, const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Plot log10 of the data (non-positive values are dropped).
  bool log_x = false;
  bool log_y = false;
};

inline constexpr int kSvgWidth = 800;
inline constexpr int kSvgHeight = 600;

/// 800x600 SVG, linear axes auto-scaled with 5% margins, one polyline per
/// series and the legend as text labels. Inline styling only.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rayleigh::output
