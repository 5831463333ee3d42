#pragma once

// CSV and SVG output for sweeps and simulations.
//
// CSV columns:
//   alpha,principle,mode,egoist_step,group_step,egoist_total_s,group_total_s,
//   p_gamma,p_alpha,p_group_support
// Numbers carry 12 significant digits; an absent value is an empty field.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stochvote/errors.hpp"
#include "stochvote/expectations.hpp"
#include "stochvote/model.hpp"
#include "stochvote/simulator.hpp"

namespace stochvote {

inline constexpr const char* kCsvHeader =
    "alpha,principle,mode,egoist_step,group_step,egoist_total_s,group_total_s,"
    "p_gamma,p_alpha,p_group_support";

struct CsvRow {
  double alpha = 0.0;
  Principle principle = Principle::A;
  std::string mode;  // exact | approx | simulate
  std::optional<double> egoist_step;
  std::optional<double> group_step;
  std::optional<double> egoist_total;
  std::optional<double> group_total;
  double p_gamma = 0.0;
  double p_alpha = 0.0;
  double p_group_support = 0.0;
};

inline CsvRow to_csv_row(const SweepPoint& point) {
  return {point.alpha,
          point.principle,
          std::string(to_string(point.mode)),
          point.egoist_step_mean,
          point.group_step_mean,
          point.egoist_total,
          point.group_total,
          point.p_accept_given_support,
          point.p_accept_given_no_support,
          point.p_group_support};
}

inline CsvRow to_csv_row(double alpha, Principle principle, const TrajectoryStats& stats) {
  CsvRow row;
  row.alpha = alpha;
  row.principle = principle;
  row.mode = "simulate";
  if (stats.mean_egoist_increment) row.egoist_step = stats.mean_egoist_increment->mean;
  if (stats.mean_group_increment) row.group_step = stats.mean_group_increment->mean;
  row.egoist_total = stats.final_egoist_capital;
  row.group_total = stats.final_group_capital;
  row.p_gamma = stats.egoists_exceed_gamma_rate;
  row.p_alpha = stats.egoists_exceed_alpha_rate;
  row.p_group_support = stats.group_support_rate;
  return row;
}

inline std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

inline std::string format_optional(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

inline void write_csv(std::ostream& out, std::span<const CsvRow> rows) {
  out << kCsvHeader << '\n';
  for (const CsvRow& r : rows) {
    out << format_number(r.alpha) << ',' << to_string(r.principle) << ',' << r.mode << ','
        << format_optional(r.egoist_step) << ',' << format_optional(r.group_step) << ','
        << format_optional(r.egoist_total) << ',' << format_optional(r.group_total) << ','
        << format_number(r.p_gamma) << ',' << format_number(r.p_alpha) << ','
        << format_number(r.p_group_support) << '\n';
  }
}

namespace detail {

inline double parse_double(const std::string& field) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    throw parameter_error("not a number: '" + field + "'");
  }
  if (used != field.size()) throw parameter_error("trailing characters in number: '" + field + "'");
  return value;
}

inline std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field);
}

}  // namespace detail

inline std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw parameter_error("CSV header does not match the expected columns");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 10) throw parameter_error("CSV row has wrong column count: " + line);
    CsvRow r;
    r.alpha = detail::parse_double(fields[0]);
    r.principle = parse_principle(fields[1]);
    r.mode = fields[2];
    r.egoist_step = detail::parse_optional(fields[3]);
    r.group_step = detail::parse_optional(fields[4]);
    r.egoist_total = detail::parse_optional(fields[5]);
    r.group_total = detail::parse_optional(fields[6]);
    r.p_gamma = detail::parse_double(fields[7]);
    r.p_alpha = detail::parse_double(fields[8]);
    r.p_group_support = detail::parse_double(fields[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// -----------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string svg_num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

inline std::string tick_label(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4g", v);
  return buffer;
}

inline std::string xml_escape(const std::string& text) {
  std::string out;
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

inline const char* principle_color(Principle p) {
  switch (p) {
    case Principle::A: return "#1f77b4";
    case Principle::B: return "#d62728";
    case Principle::APrime: return "#2ca02c";
    case Principle::ADoublePrime: return "#9467bd";
  }
  return "#000000";
}

// Roughly `count` round tick values covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int count) {
  const double span = hi - lo;
  const double raw = span / count;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * magnitude;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

}  // namespace detail

// Total-capital curves (egoist dashed, group solid) per principle and mode,
// drawn as step functions of alpha.
inline void write_svg(std::ostream& out, std::span<const CsvRow> rows, const std::string& title) {
  constexpr double width = 860, height = 520;
  constexpr double left = 80, right = 200, top = 50, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  using SeriesKey = std::pair<int, std::string>;  // (principle, mode)
  std::map<SeriesKey, std::vector<const CsvRow*>> series;
  double amin = std::numeric_limits<double>::infinity(), amax = -amin;
  double ymin = amin, ymax = -amin;
  for (const CsvRow& r : rows) {
    series[{static_cast<int>(r.principle), r.mode}].push_back(&r);
    amin = std::min(amin, r.alpha);
    amax = std::max(amax, r.alpha);
    for (const auto& v : {r.egoist_total, r.group_total}) {
      if (v && std::isfinite(*v)) {
        ymin = std::min(ymin, *v);
        ymax = std::max(ymax, *v);
      }
    }
  }
  if (!std::isfinite(amin)) amin = 0.0, amax = 1.0;
  if (amax <= amin) amax = amin + 1e-3;
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  ymin = std::min(ymin, 0.0);
  ymax = std::max(ymax, 0.0);
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const auto px = [&](double a) { return left + (a - amin) / (amax - amin) * plot_w; };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << left << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"15\">"
      << detail::xml_escape(title) << "</text>\n";

  // Axes, grid and ticks.
  out << "<g font-family=\"sans-serif\" font-size=\"11\" stroke-width=\"1\">\n";
  for (double t : detail::nice_ticks(amin, amax, 8)) {
    out << "<line x1=\"" << detail::svg_num(px(t)) << "\" y1=\"" << top << "\" x2=\""
        << detail::svg_num(px(t)) << "\" y2=\"" << top + plot_h << "\" stroke=\"#e0e0e0\"/>\n"
        << "<text x=\"" << detail::svg_num(px(t)) << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"middle\">" << detail::tick_label(t) << "</text>\n";
  }
  for (double t : detail::nice_ticks(ymin, ymax, 6)) {
    out << "<line x1=\"" << left << "\" y1=\"" << detail::svg_num(py(t)) << "\" x2=\""
        << left + plot_w << "\" y2=\"" << detail::svg_num(py(t)) << "\" stroke=\""
        << (t == 0.0 ? "#808080" : "#e0e0e0") << "\"/>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << detail::svg_num(py(t) + 4)
        << "\" text-anchor=\"end\">" << detail::tick_label(t) << "</text>\n";
  }
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 18
      << "\" text-anchor=\"middle\">alpha</text>\n"
      << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">expected capital increment over s steps</text>\n"
      << "</g>\n";

  // Curves: each value holds from its alpha up to the next grid alpha.
  int legend_row = 0;
  for (const auto& [key, points] : series) {
    const auto principle = static_cast<Principle>(key.first);
    const bool simulated = key.second == "simulate";
    for (int role = 0; role < 2; ++role) {
      std::string path;
      bool pen_down = false;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& value = role == 0 ? points[i]->group_total : points[i]->egoist_total;
        if (!value || !std::isfinite(*value)) {
          pen_down = false;
          continue;
        }
        const double x = px(points[i]->alpha);
        const double y = py(*value);
        path += pen_down ? " H" + detail::svg_num(x) + " V" + detail::svg_num(y)
                         : std::string(path.empty() ? "" : " ") + "M" + detail::svg_num(x) +
                               " " + detail::svg_num(y);
        pen_down = true;
        if (i + 1 == points.size()) path += " H" + detail::svg_num(x);
      }
      if (path.empty()) continue;
      out << "<path d=\"" << path << "\" fill=\"none\" stroke=\""
          << detail::principle_color(principle) << "\" stroke-width=\"" << (role == 0 ? 2 : 1.2)
          << "\"" << (role == 1 ? " stroke-dasharray=\"6 3\"" : "")
          << (simulated ? " stroke-opacity=\"0.55\"" : "") << "/>\n";
      const double ly = top + 14 + 18 * legend_row++;
      out << "<line x1=\"" << left + plot_w + 14 << "\" y1=\"" << ly << "\" x2=\""
          << left + plot_w + 44 << "\" y2=\"" << ly << "\" stroke=\""
          << detail::principle_color(principle) << "\" stroke-width=\"" << (role == 0 ? 2 : 1.2)
          << "\"" << (role == 1 ? " stroke-dasharray=\"6 3\"" : "")
          << (simulated ? " stroke-opacity=\"0.55\"" : "") << "/>\n"
          << "<text x=\"" << left + plot_w + 50 << "\" y=\"" << ly + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << to_string(principle) << ' '
          << (role == 0 ? "group" : "egoist") << " (" << key.second << ")</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace stochvote
