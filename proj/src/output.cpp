#include "rayleigh/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rayleigh::output {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

std::string format_short(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ << (i ? "," : "") << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << (i ? "," : "") << format_double(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(long long index, const std::vector<double>& values) {
  if (values.size() + 1 != columns_) throw std::logic_error("csv row width mismatch");
  out_ << index;
  for (double v : values) out_ << ',' << format_double(v);
  out_ << '\n';
}

namespace {

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Empty or degenerate ranges get a unit (or 5%) width, then 5% margins.
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo <= 0.0) {
      const double pad = lo == 0.0 ? 0.5 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  constexpr double left = 90, right = 30, top = 50, bottom = 60;
  const double plot_w = kSvgWidth - left - right;
  const double plot_h = kSvgHeight - top - bottom;

  // Transformed copies of the data.
  std::vector<std::vector<std::pair<double, double>>> points(series.size());
  Range xr, yr;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto n = std::min(series[s].x.size(), series[s].y.size());
    for (std::size_t i = 0; i < n; ++i) {
      double x = series[s].x[i], y = series[s].y[i];
      if (spec.log_x) x = x > 0 ? std::log10(x) : std::numeric_limits<double>::quiet_NaN();
      if (spec.log_y) y = y > 0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN();
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      points[s].emplace_back(x, y);
      xr.add(x);
      yr.add(y);
    }
  }
  xr.finish();
  yr.finish();
  const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  const auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSvgWidth << "\" height=\""
      << kSvgHeight << "\" viewBox=\"0 0 " << kSvgWidth << ' ' << kSvgHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight
      << "\" style=\"fill:#ffffff;stroke:none\"/>\n"
      << "<text x=\"" << kSvgWidth / 2 << "\" y=\"28\" style=\"font-family:sans-serif;"
      << "font-size:18px;text-anchor:middle\">" << escape_xml(spec.title) << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" style=\"fill:none;stroke:#000000;stroke-width:1\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    svg << "<line x1=\"" << fmt_coord(px(fx)) << "\" y1=\"" << top + plot_h << "\" x2=\""
        << fmt_coord(px(fx)) << "\" y2=\"" << top + plot_h + 5
        << "\" style=\"stroke:#000000\"/>\n"
        << "<text x=\"" << fmt_coord(px(fx)) << "\" y=\"" << top + plot_h + 20
        << "\" style=\"font-family:sans-serif;font-size:12px;text-anchor:middle\">"
        << fmt_tick(fx) << "</text>\n"
        << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt_coord(py(fy)) << "\" x2=\"" << left
        << "\" y2=\"" << fmt_coord(py(fy)) << "\" style=\"stroke:#000000\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << fmt_coord(py(fy) + 4)
        << "\" style=\"font-family:sans-serif;font-size:12px;text-anchor:end\">"
        << fmt_tick(fy) << "</text>\n";
  }
  const std::string x_label = spec.log_x ? "log10 " + spec.x_label : spec.x_label;
  const std::string y_label = spec.log_y ? "log10 " + spec.y_label : spec.y_label;
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << kSvgHeight - 15
      << "\" style=\"font-family:sans-serif;font-size:14px;text-anchor:middle\">"
      << escape_xml(x_label) << "</text>\n"
      << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 20 "
      << top + plot_h / 2
      << ")\" style=\"font-family:sans-serif;font-size:14px;text-anchor:middle\">"
      << escape_xml(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    svg << "<polyline style=\"fill:none;stroke:" << color << ";stroke-width:1\" points=\"";
    for (std::size_t i = 0; i < points[s].size(); ++i) {
      svg << (i ? " " : "") << fmt_coord(px(points[s][i].first)) << ','
          << fmt_coord(py(points[s][i].second));
    }
    svg << "\"/>\n";
    if (points[s].size() == 1) {
      svg << "<circle cx=\"" << fmt_coord(px(points[s][0].first)) << "\" cy=\""
          << fmt_coord(py(points[s][0].second)) << "\" r=\"3\" style=\"fill:" << color
          << "\"/>\n";
    }
    svg << "<text x=\"" << left + plot_w - 10 << "\" y=\"" << top + 20 + 18 * s
        << "\" style=\"font-family:sans-serif;font-size:13px;text-anchor:end;fill:" << color
        << "\">" << escape_xml(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

}  // namespace rayleigh::output
