#include "bgrecon/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bgrecon {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;
constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Point {
  double x, y;
};

bool parse_cell(const std::string& cell, double& value) {
  if (cell.empty()) return false;
  char* end = nullptr;
  value = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && std::isfinite(value);
}

std::vector<Point> read_series(const PlotSeries& s, const PlotOptions& opt) {
  std::ifstream in(s.csv);
  if (!in) throw std::runtime_error("plot: cannot read " + s.csv.string());
  std::vector<Point> points;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (static_cast<int>(cells.size()) <= s.column) continue;
    Point p{};
    if (!parse_cell(cells[0], p.x) || !parse_cell(cells[s.column], p.y)) continue;
    if ((opt.log_x && p.x <= 0.0) || (opt.log_y && p.y <= 0.0)) continue;
    if (opt.log_x) p.x = std::log10(p.x);
    if (opt.log_y) p.y = std::log10(p.y);
    points.push_back(p);
  }
  return points;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string tick_label(double v, bool log_axis) {
  return log_axis ? fmt("%.3g", std::pow(10.0, v)) : fmt("%.3g", std::abs(v) < 1e-14 ? 0.0 : v);
}

}  // namespace

std::string render_plot(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("plot: no series given");

  std::vector<std::vector<Point>> data;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    data.push_back(read_series(s, options));
    for (const auto& p : data.back()) {
      xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad, ymax += pad;

  const double w = kWidth - kLeft - kRight;
  const double h = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * w; };
  const auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(options.title) << "</text>\n";
  }
  svg << "<rect x=\"" << fmt("%.2f", kLeft) << "\" y=\"" << fmt("%.2f", kTop) << "\" width=\""
      << fmt("%.2f", w) << "\" height=\"" << fmt("%.2f", h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = xmin + (xmax - xmin) * i / kTicks;
    const double yv = ymin + (ymax - ymin) * i / kTicks;
    const double px = sx(xv), py = sy(yv);
    svg << "<line x1=\"" << fmt("%.2f", px) << "\" y1=\"" << fmt("%.2f", kTop + h) << "\" x2=\""
        << fmt("%.2f", px) << "\" y2=\"" << fmt("%.2f", kTop + h + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt("%.2f", px) << "\" y=\"" << fmt("%.2f", kTop + h + 20)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(xv, options.log_x)
        << "</text>\n";
    svg << "<line x1=\"" << fmt("%.2f", kLeft - 5) << "\" y1=\"" << fmt("%.2f", py) << "\" x2=\""
        << fmt("%.2f", kLeft) << "\" y2=\"" << fmt("%.2f", py) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt("%.2f", kLeft - 8) << "\" y=\"" << fmt("%.2f", py + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(yv, options.log_y)
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt("%.2f", kLeft + w / 2) << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(options.x_label + (options.log_x ? " (log)" : "")) << "</text>\n";
  if (!options.y_label.empty() || options.log_y) {
    svg << "<text x=\"16\" y=\"" << fmt("%.2f", kTop + h / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << fmt("%.2f", kTop + h / 2) << ")\">"
        << escape(options.y_label + (options.log_y ? " (log)" : "")) << "</text>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = kPalette[i % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < data[i].size(); ++j) {
      if (j) svg << ' ';
      svg << fmt("%.2f", sx(data[i][j].x)) << ',' << fmt("%.2f", sy(data[i][j].y));
    }
    svg << "\"/>\n";
  }

  // legend, top right inside the frame
  const double lx = kLeft + w - 170.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << fmt("%.2f", lx) << "\" y1=\"" << fmt("%.2f", ly) << "\" x2=\""
        << fmt("%.2f", lx + 24) << "\" y2=\"" << fmt("%.2f", ly) << "\" stroke=\""
        << kPalette[i % kPalette.size()] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt("%.2f", lx + 30) << "\" y=\"" << fmt("%.2f", ly + 4)
        << "\" font-size=\"12\">" << escape(series[i].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& out,
               const PlotOptions& options) {
  const std::string text = render_plot(series, options);
  std::ofstream file(out, std::ios::binary);
  file << text;
  if (!file) throw std::runtime_error("plot: cannot write " + out.string());
}

}  // namespace bgrecon
