#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drugsim {

// Reads the battery CSVs back in and renders static SVG comparisons. The
// charts are cosmetic; every evaluation reads the CSVs directly.

struct SeriesRow {
  std::string protocol;
  std::uint64_t seed = 0;
  double time_s = 0.0;
  double value = 0.0;
};

inline std::vector<SeriesRow> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != "protocol,seed,time_s,value") {
    throw std::runtime_error(path + ": missing or malformed header");
  }
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    SeriesRow row;
    std::string field;
    if (!std::getline(ss, row.protocol, ',')) break;
    if (!std::getline(ss, field, ',')) break;
    row.seed = std::stoull(field);
    if (!std::getline(ss, field, ',')) break;
    row.time_s = std::stod(field);
    if (!std::getline(ss, field, ',')) break;
    row.value = std::stod(field);
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }
  return rows;
}

namespace plotdetail {

inline const char* series_color(const std::string& protocol, std::size_t i) {
  if (protocol == "drug") return "#1b9e77";
  if (protocol == "spin") return "#d95f02";
  if (protocol == "flooding") return "#7570b3";
  static const char* fallback[] = {"#e7298a", "#66a61e", "#e6ab02"};
  return fallback[i % 3];
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Frame {
  static constexpr double width = 640.0;
  static constexpr double height = 420.0;
  static constexpr double left = 70.0;
  static constexpr double right = 610.0;
  static constexpr double top = 40.0;
  static constexpr double bottom = 370.0;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  double px(double x) const {
    return left + (x - x_min) / (x_max - x_min) * (right - left);
  }
  double py(double y) const {
    return bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
  }
};

inline void open_svg(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::width
      << "\" height=\"" << Frame::height << "\" viewBox=\"0 0 " << Frame::width
      << ' ' << Frame::height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << Frame::width / 2
      << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << title << "</text>\n";
}

inline void draw_axes(std::ostringstream& svg, const Frame& f,
                      const std::string& x_label, const std::string& y_label) {
  svg << "<line x1=\"" << f.left << "\" y1=\"" << f.bottom << "\" x2=\""
      << f.right << "\" y2=\"" << f.bottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left
      << "\" y2=\"" << f.bottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x_min + (f.x_max - f.x_min) * i / 5.0;
    const double yv = f.y_min + (f.y_max - f.y_min) * i / 5.0;
    svg << "<text x=\"" << f.px(xv) << "\" y=\"" << f.bottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(xv) << "</text>\n"
        << "<text x=\"" << f.left - 8 << "\" y=\"" << f.py(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(yv) << "</text>\n";
  }
  svg << "<text x=\"" << (f.left + f.right) / 2 << "\" y=\""
      << Frame::height - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << (f.top + f.bottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << (f.top + f.bottom) / 2 << ")\">" << y_label << "</text>\n";
}

}  // namespace plotdetail

/// Seed-averaged line chart, one series per protocol, written as a single
/// self-contained SVG.
inline void render_line_chart(const std::string& out_path,
                              const std::vector<SeriesRow>& rows,
                              const std::string& title,
                              const std::string& y_label) {
  using plotdetail::Frame;
  // protocol -> time -> (sum, count), in first-appearance protocol order
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::pair<double, int>>> agg;
  for (const SeriesRow& row : rows) {
    if (agg.find(row.protocol) == agg.end()) {
      order.push_back(row.protocol);
    }
    auto& cell = agg[row.protocol][row.time_s];
    cell.first += row.value;
    cell.second += 1;
  }

  Frame f;
  f.x_min = f.x_max = rows.front().time_s;
  f.y_min = f.y_max = rows.front().value;
  for (const SeriesRow& row : rows) {
    f.x_min = std::min(f.x_min, row.time_s);
    f.x_max = std::max(f.x_max, row.time_s);
    f.y_min = std::min(f.y_min, row.value);
    f.y_max = std::max(f.y_max, row.value);
  }
  if (f.x_max == f.x_min) f.x_max = f.x_min + 1.0;
  if (f.y_max == f.y_min) f.y_max = f.y_min + 1.0;
  f.y_min = std::min(0.0, f.y_min);

  std::ostringstream svg;
  plotdetail::open_svg(svg, title);
  plotdetail::draw_axes(svg, f, "time (s)", y_label);
  std::size_t idx = 0;
  for (const std::string& protocol : order) {
    svg << "<polyline fill=\"none\" stroke=\""
        << plotdetail::series_color(protocol, idx) << "\" stroke-width=\"2\" "
        << "points=\"";
    for (const auto& [time, cell] : agg[protocol]) {
      svg << f.px(time) << ',' << f.py(cell.first / cell.second) << ' ';
    }
    svg << "\"/>\n";
    const double ly = Frame::top + 16.0 * static_cast<double>(idx);
    svg << "<rect x=\"" << Frame::right - 110 << "\" y=\"" << ly - 9
        << "\" width=\"12\" height=\"4\" fill=\""
        << plotdetail::series_color(protocol, idx) << "\"/>\n"
        << "<text x=\"" << Frame::right - 92 << "\" y=\"" << ly - 3
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << protocol
        << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";

  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot write " + out_path);
  }
  out << svg.str();
}

/// Seed-averaged bar chart of first-death times (runs without a death count
/// at the full simulated duration).
inline void render_first_death_chart(const std::string& out_path,
                                     const std::vector<SeriesRow>& rows,
                                     const std::string& title) {
  using plotdetail::Frame;
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, int>> agg;
  for (const SeriesRow& row : rows) {
    if (agg.find(row.protocol) == agg.end()) {
      order.push_back(row.protocol);
    }
    auto& cell = agg[row.protocol];
    cell.first += row.time_s;
    cell.second += 1;
  }

  Frame f;
  f.x_min = 0.0;
  f.x_max = static_cast<double>(order.size());
  f.y_min = 0.0;
  f.y_max = 0.0;
  for (const std::string& p : order) {
    f.y_max = std::max(f.y_max, agg[p].first / agg[p].second);
  }
  if (f.y_max == 0.0) f.y_max = 1.0;
  f.y_max *= 1.1;

  std::ostringstream svg;
  plotdetail::open_svg(svg, title);
  svg << "<line x1=\"" << f.left << "\" y1=\"" << f.bottom << "\" x2=\""
      << f.right << "\" y2=\"" << f.bottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left
      << "\" y2=\"" << f.bottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double yv = f.y_min + (f.y_max - f.y_min) * i / 5.0;
    svg << "<text x=\"" << f.left - 8 << "\" y=\"" << f.py(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << plotdetail::fmt(yv) << "</text>\n";
  }
  std::size_t idx = 0;
  for (const std::string& protocol : order) {
    const double mean = agg[protocol].first / agg[protocol].second;
    const double x0 = f.px(static_cast<double>(idx) + 0.25);
    const double x1 = f.px(static_cast<double>(idx) + 0.75);
    svg << "<rect x=\"" << x0 << "\" y=\"" << f.py(mean) << "\" width=\""
        << x1 - x0 << "\" height=\"" << f.bottom - f.py(mean) << "\" fill=\""
        << plotdetail::series_color(protocol, idx) << "\"/>\n"
        << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << f.bottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << protocol << "</text>\n"
        << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << f.py(mean) - 6
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << plotdetail::fmt(mean) << "</text>\n";
    ++idx;
  }
  svg << "<text x=\"16\" y=\"" << (f.top + f.bottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << (f.top + f.bottom) / 2 << ")\">mean first death (s)</text>\n"
      << "</svg>\n";

  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot write " + out_path);
  }
  out << svg.str();
}

/// Renders first_death.svg, delivery_ratio.svg, and residual_energy.svg from
/// the battery CSVs found in `dir`.
inline void render_plots(const std::string& dir) {
  render_first_death_chart(dir + "/first_death.svg",
                           read_series_csv(dir + "/first_death.csv"),
                           "First node death by protocol");
  render_line_chart(dir + "/delivery_ratio.svg",
                    read_series_csv(dir + "/delivery_ratio.csv"),
                    "Delivery ratio vs time", "delivery ratio");
  render_line_chart(dir + "/residual_energy.svg",
                    read_series_csv(dir + "/residual_energy.csv"),
                    "Residual energy vs time", "residual energy (J)");
}

}  // namespace drugsim
