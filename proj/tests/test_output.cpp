#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rayleigh/output.hpp"

using namespace rayleigh::output;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rayleigh_output_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(FormatDouble, RoundTripsWithSeventeenDigits) {
  for (double x : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 1.0, 0.0}) {
    const std::string s = format_double(x);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), x) << s;
  }
  EXPECT_EQ(format_double(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(format_double(-2.0), "-2.0000000000000000e+00");
}

TEST(FormatShort, ShortestForm) {
  EXPECT_EQ(format_short(0.1), "0.1");
  EXPECT_EQ(format_short(0.0125), "0.0125");
  EXPECT_EQ(format_short(2.0), "2");
}

TEST(CsvWriter, HeaderAndRows) {
  const fs::path dir = scratch("csv");
  {
    CsvWriter csv(dir / "nested" / "a.csv", {"t", "x"});
    csv.row({0.0, 1.5});
    EXPECT_THROW(csv.row({1.0}), std::logic_error);
  }
  EXPECT_EQ(slurp(dir / "nested" / "a.csv"), "t,x\n0.0000000000000000e+00,1.5000000000000000e+00\n");
  {
    CsvWriter csv(dir / "b.csv", {"k", "defect"});
    csv.row(7, {0.25});
  }
  EXPECT_EQ(slurp(dir / "b.csv"), "k,defect\n7,2.5000000000000000e-01\n");
  fs::remove_all(dir);
}

TEST(RenderSvg, StandaloneWithOnePolylinePerSeries) {
  PlotSpec spec{.title = "a < b & \"c\"", .x_label = "t", .y_label = "H"};
  const std::string svg =
      render_svg(spec, {{"one", {0, 1, 2}, {1, 0, 1}}, {"two", {0, 1}, {3, 4}}});
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("width=\"800\" height=\"600\""), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find("a &lt; b &amp; &quot;c&quot;"), std::string::npos);
  EXPECT_EQ(svg.find("href"), std::string::npos);
  EXPECT_EQ(svg.find(" b & "), std::string::npos);
  EXPECT_NE(svg.find(">one</text>"), std::string::npos);
  EXPECT_NE(svg.find(">two</text>"), std::string::npos);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
}

TEST(RenderSvg, SinglePointAndEmptySeries) {
  const std::string one = render_svg({.title = "p"}, {{"p", {0.5}, {0.5}}});
  EXPECT_EQ(count(one, "<circle"), 1u);
  const std::string none = render_svg({.title = "empty"}, {});
  EXPECT_EQ(count(none, "<polyline"), 0u);
  EXPECT_EQ(none.find("nan"), std::string::npos);
}

TEST(RenderSvg, LogAxesDropNonPositive) {
  const std::string svg = render_svg({.title = "log", .log_x = true, .log_y = true},
                                     {{"e", {0.1, 0.0, 0.01}, {1e-3, 1.0, -1.0}}});
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
  EXPECT_NE(svg.find("log10 "), std::string::npos);
  EXPECT_EQ(count(svg, "<circle"), 1u);
}

TEST(WriteText, CreatesParents) {
  const fs::path dir = scratch("text");
  write_text(dir / "x" / "y.txt", "hello");
  EXPECT_EQ(slurp(dir / "x" / "y.txt"), "hello");
  fs::remove_all(dir);
}
