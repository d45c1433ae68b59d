#include "gcnsamp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace gcnsamp {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const SvgChart& chart) {
  if (chart.series.empty()) throw ConfigError("svg: no series");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : chart.series) {
    if (s.points.empty()) throw ConfigError("svg: series '" + s.name + "' is empty");
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) throw ConfigError("svg: non-finite point in '" + s.name + "'");
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double left = 70, right = 160, top = 40, bottom = 55;
  const double pw = chart.width - left - right, ph = chart.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
    << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(chart.title)
    << "</text>\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
    << fmt(top + ph) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(top + ph)
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    o << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(px(xv)) << "\" y2=\""
      << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(xv) << "</text>\n";
    o << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(py(yv)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << tick_label(yv)
      << "</text>\n";
  }
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(chart.height - 12.0) << "\" text-anchor=\"middle\">"
    << escape(chart.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(chart.y_label) << "</text>\n";
  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& ser = chart.series[s];
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < ser.points.size(); ++i)
      o << (i ? " " : "") << fmt(px(ser.points[i].first)) << ',' << fmt(py(ser.points[i].second));
    o << "\"/>\n";
    for (const auto& [x, y] : ser.points)
      o << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = top + 10 + 18.0 * double(s);
    o << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw + 32) << "\" y2=\""
      << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fmt(left + pw + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(ser.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

SvgChart chart_from_table(const CsvTable& table, const std::string& x_column, const std::string& y_column,
                          const std::vector<std::string>& series_columns, const std::string& title) {
  const std::size_t xc = table.column(x_column), yc = table.column(y_column);
  std::vector<std::size_t> sc;
  for (const auto& c : series_columns) sc.push_back(table.column(c));
  SvgChart chart;
  chart.title = title;
  chart.x_label = x_column;
  chart.y_label = y_column;
  std::map<std::string, double> categories;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    std::string name;
    for (std::size_t i = 0; i < sc.size(); ++i) name += (i ? " / " : "") + row[sc[i]];
    double x;
    try {
      x = parse_double(row[xc]);
    } catch (const ConfigError&) {
      auto it = categories.find(row[xc]);
      if (it == categories.end()) it = categories.emplace(row[xc], double(categories.size() + 1)).first;
      x = it->second;
    }
    const double y = parse_double(row[yc]);
    auto it = index.find(name);
    if (it == index.end()) {
      it = index.emplace(name, chart.series.size()).first;
      chart.series.push_back({name, {}});
    }
    chart.series[it->second].points.emplace_back(x, y);
  }
  if (chart.series.empty()) throw ConfigError("svg: table has no rows");
  return chart;
}

}  // namespace gcnsamp
