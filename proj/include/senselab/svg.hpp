#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace senselab {

// Self-contained SVG line and bar charts. Primitive on purpose: the plots
// must be reproducible byte for byte and diffable, so no plotting library
// and no floating layout.

namespace svg_detail {

inline constexpr const char* kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};
inline constexpr int kPaletteSize = 10;

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick positions over [lo, hi] at a 1/2/5 step.
inline std::vector<double> linear_ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 1e-12 * span; t += step) {
    ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

}  // namespace svg_detail

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;

  std::string render() const {
    using namespace svg_detail;
    constexpr double kW = 880, kH = 540;
    constexpr double kLeft = 80, kRight = 700, kTop = 50, kBottom = 480;

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -y_lo;
    for (const auto& s : series) {
      for (auto [x, y] : s.points) {
        const double xv = log_x ? std::log10(x) : x;
        x_lo = std::min(x_lo, xv);
        x_hi = std::max(x_hi, xv);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
      }
    }
    if (!(x_hi > x_lo)) {
      x_lo -= 0.5;
      x_hi += 0.5;
    }
    if (!(y_hi > y_lo)) {
      y_lo -= 0.05;
      y_hi += 0.05;
    }
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    auto px = [&](double x) {
      const double xv = log_x ? std::log10(x) : x;
      return kLeft + (xv - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
    };
    auto py = [&](double y) {
      return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
        << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
        << "\">\n";
    out << "<rect width=\"" << kW << "\" height=\"" << kH
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"24\" "
        << "text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape(title) << "</text>\n";

    // axes
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\""
        << kRight << "\" y2=\"" << kBottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
        << "\" y2=\"" << kBottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // x ticks
    std::vector<double> xticks;
    if (log_x) {
      for (int e = static_cast<int>(std::floor(x_lo));
           e <= static_cast<int>(std::ceil(x_hi)); ++e) {
        if (e >= x_lo - 1e-9 && e <= x_hi + 1e-9) {
          xticks.push_back(std::pow(10.0, e));
        }
      }
    } else {
      xticks = linear_ticks(x_lo, x_hi);
    }
    for (double t : xticks) {
      const double x = px(t);
      out << "<line x1=\"" << num(x) << "\" y1=\"" << kBottom << "\" x2=\""
          << num(x) << "\" y2=\"" << kBottom + 5
          << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << num(x) << "\" y=\"" << kBottom + 20
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << short_num(t) << "</text>\n";
    }
    // y ticks
    for (double t : linear_ticks(y_lo, y_hi)) {
      const double y = py(t);
      out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(y) << "\" x2=\""
          << kLeft << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << kLeft - 9 << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << short_num(t) << "</text>\n";
      out << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\""
          << kRight << "\" y2=\"" << num(y)
          << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    }

    // axis labels
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 45
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\">" << escape(x_label) << "</text>\n";
    out << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 20 "
        << (kTop + kBottom) / 2 << ")\">" << escape(y_label) << "</text>\n";

    // series
    for (std::size_t s = 0; s < series.size(); ++s) {
      const char* color = kPalette[s % kPaletteSize];
      std::ostringstream pts;
      for (auto [x, y] : series[s].points) {
        pts << num(px(x)) << ',' << num(py(y)) << ' ';
      }
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\" points=\"" << pts.str() << "\"/>\n";
      for (auto [x, y] : series[s].points) {
        out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
            << "\" r=\"2.6\" fill=\"" << color << "\"/>\n";
      }
      // legend
      const double ly = kTop + 18.0 * static_cast<double>(s);
      out << "<line x1=\"" << kRight + 14 << "\" y1=\"" << num(ly)
          << "\" x2=\"" << kRight + 38 << "\" y2=\"" << num(ly)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << kRight + 44 << "\" y=\"" << num(ly + 4)
          << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << escape(series[s].name) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
  }
};

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one bar per series
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> series_names;  // legend; size = bars per group
  std::vector<BarGroup> groups;

  std::string render() const {
    using namespace svg_detail;
    constexpr double kW = 880, kH = 540;
    constexpr double kLeft = 80, kRight = 720, kTop = 50, kBottom = 430;

    double y_hi = 0.0;
    double y_lo = 0.0;
    for (const auto& g : groups) {
      for (double v : g.values) {
        y_hi = std::max(y_hi, v);
        y_lo = std::min(y_lo, v);
      }
    }
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    y_hi *= 1.08;
    if (y_lo < 0.0) y_lo *= 1.08;

    auto py = [&](double y) {
      return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
        << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
        << "\">\n";
    out << "<rect width=\"" << kW << "\" height=\"" << kH
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"24\" "
        << "text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape(title) << "</text>\n";

    for (double t : linear_ticks(y_lo, y_hi)) {
      const double y = py(t);
      out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(y) << "\" x2=\""
          << kLeft << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << kLeft - 9 << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << short_num(t) << "</text>\n";
      out << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\""
          << kRight << "\" y2=\"" << num(y)
          << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    }
    out << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(0.0)) << "\" x2=\""
        << kRight << "\" y2=\"" << num(py(0.0)) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
        << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
    out << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 20 "
        << (kTop + kBottom) / 2 << ")\">" << escape(y_label) << "</text>\n";

    const auto n_groups = groups.size();
    const auto bars_per = std::max<std::size_t>(
        1, series_names.empty() ? 1 : series_names.size());
    const double group_w = (kRight - kLeft) / static_cast<double>(n_groups);
    const double bar_w = group_w * 0.8 / static_cast<double>(bars_per);

    for (std::size_t g = 0; g < n_groups; ++g) {
      const double gx = kLeft + group_w * (static_cast<double>(g) + 0.1);
      for (std::size_t b = 0; b < groups[g].values.size(); ++b) {
        const double v = groups[g].values[b];
        const double x = gx + bar_w * static_cast<double>(b);
        const double y0 = py(std::max(0.0, v));
        const double h = std::fabs(py(v) - py(0.0));
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(y0) << "\" width=\""
            << num(bar_w * 0.92) << "\" height=\"" << num(h) << "\" fill=\""
            << kPalette[b % kPaletteSize] << "\"/>\n";
      }
      const double cx = gx + bar_w * static_cast<double>(bars_per) / 2.0;
      out << "<text x=\"" << num(cx) << "\" y=\"" << kBottom + 12
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"10\" transform=\"rotate(-45 " << num(cx) << ' '
          << kBottom + 12 << ")\">" << escape(groups[g].label) << "</text>\n";
    }

    for (std::size_t s = 0; s < series_names.size(); ++s) {
      const double ly = kTop + 18.0 * static_cast<double>(s);
      out << "<rect x=\"" << kRight + 14 << "\" y=\"" << num(ly - 8)
          << "\" width=\"12\" height=\"12\" fill=\""
          << kPalette[s % kPaletteSize] << "\"/>\n";
      out << "<text x=\"" << kRight + 32 << "\" y=\"" << num(ly + 2)
          << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << escape(series_names[s]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
  }
};

}  // namespace senselab
