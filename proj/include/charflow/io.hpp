#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/errors.hpp"
#include "charflow/integrator.hpp"
#include "charflow/reconstruct.hpp"

namespace charflow {

/// Shortest round-trip text for a double ("%.17g").
inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace detail

/// `T,E,min_v,min_cos2`, one row per step.
inline void write_energy_csv(const RunTrace& trace, const std::string& path) {
  auto out = detail::open_out(path);
  out << "T,E,min_v,min_cos2\n";
  for (const auto& r : trace.steps)
    out << fmt_real(r.T) << ',' << fmt_real(r.E) << ',' << fmt_real(r.min_v) << ',' << fmt_real(r.min_cos2) << '\n';
}

/// `Z,u,w,v,x`, one row per characteristic.
inline void write_snapshot_csv(const CharState& s, const std::string& path) {
  auto out = detail::open_out(path);
  out << "# charflow-snapshot v1 T=" << fmt_real(s.T) << '\n';
  out << "Z,u,w,v,x\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << fmt_real(s.Z[i]) << ',' << fmt_real(s.u[i]) << ',' << fmt_real(s.w[i]) << ',' << fmt_real(s.v[i]) << ','
        << fmt_real(s.x[i]) << '\n';
}

/// `x,u,ux` under a `# charflow-field v1 t=<value>` header; ux is empty where masked.
inline void write_field_csv(const PhysicalField& f, const std::string& path) {
  auto out = detail::open_out(path);
  out << "# charflow-field v1 t=" << fmt_real(f.t) << '\n';
  out << "x,u,ux\n";
  for (std::size_t i = 0; i < f.x.size; ++i) {
    out << fmt_real(f.x[i]) << ',' << fmt_real(f.u[i]) << ',';
    if (f.valid[i]) out << fmt_real(f.ux[i]);
    out << '\n';
  }
}

/// A numeric CSV: '#' lines are comments (the first is kept), then a header
/// row, then rows of numbers. Empty cells read as NaN.
struct CsvTable {
  std::string comment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }

  std::vector<double> values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (t.comment.empty()) t.comment = line;
      continue;
    }
    if (t.columns.empty()) {
      t.columns = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) throw Error(path + ": row width differs from header");
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
      row[i] = cells[i].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cells[i]);
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw Error(path + ": no header row");
  return t;
}

/// One polyline of a line plot.
struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Writes a plain SVG line plot with axes, tick labels and a legend.
/// NaN points break the line.
inline void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
  constexpr double W = 800, H = 500, ml = 80, mr = 160, mt = 40, mb = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  const auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  auto out = detail::open_out(path);
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                ml, mt, W - ml - mr, H - mt - mb);
  out << buf;
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                  px(xv), H - mb + 16, xv);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                  ml - 6, py(yv) + 4, yv);
    out << buf;
  }
  out << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << H - 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"20\" y=\"" << (mt + (H - mt - mb) / 2) << "\" transform=\"rotate(-90 20 " << (mt + (H - mt - mb) / 2)
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << y_label << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 8];
    std::string d;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        pen = false;
        continue;
      }
      std::snprintf(buf, sizeof buf, "%c%.2f,%.2f ", pen ? 'L' : 'M', px(s.x[i]), py(s.y[i]));
      d += buf;
      pen = true;
    }
    out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double ly = mt + 16.0 * static_cast<double>(k + 1);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\">",
                  W - mr + 10, ly - 4, W - mr + 30, ly - 4, color, W - mr + 35, ly);
    out << buf << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace charflow
