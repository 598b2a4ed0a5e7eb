#pragma once

#include "rellich/io.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace rellich {

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  bool log_x = true;
  bool log_y = true;
  std::vector<double> guide_slopes;  // reference lines through the first data point
  int width = 640;
  int height = 420;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

/// Polyline SVG of CSV columns; missing columns are a PreconditionError,
/// an empty table gives empty axes.
inline std::string render_svg(const CsvData& data, const PlotSpec& spec) {
  const int xc = data.column(spec.x_column);
  require(xc >= 0, "plot: missing column '" + spec.x_column + "'");
  std::vector<int> yc;
  for (const auto& name : spec.y_columns) {
    const int c = data.column(name);
    require(c >= 0, "plot: missing column '" + name + "'");
    yc.push_back(c);
  }
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [](double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); };

  std::vector<std::vector<std::pair<double, double>>> series(yc.size());
  double x0 = infinity, x1 = -infinity, y0 = infinity, y1 = -infinity;
  for (const auto& row : data.rows) {
    if (static_cast<int>(row.size()) <= xc) continue;
    double x = 0.0;
    try {
      x = parse_number(row[xc]);
    } catch (const PreconditionError&) {
      continue;
    }
    if (!usable(x, spec.log_x)) continue;
    for (std::size_t s = 0; s < yc.size(); ++s) {
      if (static_cast<int>(row.size()) <= yc[s]) continue;
      double y = 0.0;
      try {
        y = parse_number(row[yc[s]]);
      } catch (const PreconditionError&) {
        continue;
      }
      if (!usable(y, spec.log_y)) continue;
      series[s].emplace_back(tx(x), ty(y));
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  }
  const bool empty = !(x0 <= x1);
  if (empty) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-12) y1 = y0 + 1.0;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << detail::xml_escape(spec.title) << "</text>\n";
  svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n";
  svg << "</g>\n";
  auto label = [&](double v, bool log) { return log ? "1e" + format_number(std::round(v * 100) / 100) : format_number(v); };
  svg << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    svg << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
        << detail::xml_escape(label(xv, spec.log_x)) << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 3 << "\" text-anchor=\"end\">"
        << detail::xml_escape(label(yv, spec.log_y)) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 10 << "\" text-anchor=\"middle\">"
      << detail::xml_escape(spec.x_column) << "</text>\n";
  svg << "</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].empty()) continue;
    svg << "<polyline class=\"series\" data-column=\"" << detail::xml_escape(spec.y_columns[s]) << "\" fill=\"none\" stroke=\""
        << colours[s % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].size(); ++i)
      svg << (i ? " " : "") << px(series[s][i].first) << ',' << py(series[s][i].second);
    svg << "\"/>\n";
  }
  // Guide lines in plot coordinates; in log-log axes the slope is the exponent.
  if (!empty && !series.empty() && !series.front().empty()) {
    const auto [gx, gy] = series.front().front();
    for (double slope : spec.guide_slopes) {
      const double ya = gy, yb = gy + slope * (x1 - gx);
      svg << "<line class=\"guide\" data-slope=\"" << format_number(slope) << "\" x1=\"" << px(gx) << "\" y1=\"" << py(ya)
          << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yb) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
  }
  svg << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (std::size_t s = 0; s < spec.y_columns.size(); ++s)
    svg << "<text x=\"" << left + 8 << "\" y=\"" << top + 12 + 12 * s << "\" fill=\"" << colours[s % 6] << "\">"
        << detail::xml_escape(spec.y_columns[s]) << "</text>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace rellich
