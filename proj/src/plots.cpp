#include "psectd/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace psectd {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 78.0;
constexpr double kRight = 24.0;
constexpr double kTop = 42.0;
constexpr double kBottom = 56.0;
constexpr double kLogFloor = 1e-16;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double clamp(double v) const { return log ? std::max(v, kLogFloor) : v; }
  double unit(double v) const {
    const double c = clamp(v);
    if (log) return (std::log10(c) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    return (c - lo) / (hi - lo);
  }
};

Axis fit_axis(const std::vector<double>& values, bool log) {
  Axis axis;
  axis.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (std::isnan(v)) continue;
    const double c = log ? std::max(v, kLogFloor) : v;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  if (!std::isfinite(lo)) {
    lo = log ? kLogFloor : 0.0;
    hi = log ? 1.0 : 1.0;
  }
  if (log) {
    axis.lo = std::pow(10.0, std::floor(std::log10(lo)));
    axis.hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (axis.lo == axis.hi) axis.hi = axis.lo * 10.0;
  } else {
    const double pad = (hi - lo) * 0.05;
    axis.lo = lo - pad;
    axis.hi = hi + pad;
    if (axis.lo == axis.hi) {
      axis.lo -= 0.5;
      axis.hi += 0.5;
    }
  }
  return axis;
}

std::vector<double> axis_ticks(const Axis& axis) {
  std::vector<double> ticks;
  if (axis.log) {
    const int d0 = static_cast<int>(std::round(std::log10(axis.lo)));
    const int d1 = static_cast<int>(std::round(std::log10(axis.hi)));
    int step = 1;
    while ((d1 - d0) / step > 9) ++step;
    for (int d = d0; d <= d1; d += step) ticks.push_back(std::pow(10.0, d));
  } else {
    for (int i = 0; i <= 5; ++i) {
      ticks.push_back(axis.lo + (axis.hi - axis.lo) * i / 5.0);
    }
  }
  return ticks;
}

}  // namespace

std::string render_series_svg(const std::vector<PlotSeries>& series,
                              const PlotSpec& spec) {
  std::vector<double> all_x, all_y;
  for (const auto& s : series) {
    all_x.insert(all_x.end(), s.x.begin(), s.x.end());
    all_y.insert(all_y.end(), s.y.begin(), s.y.end());
    all_y.insert(all_y.end(), s.lo.begin(), s.lo.end());
    all_y.insert(all_y.end(), s.hi.begin(), s.hi.end());
  }
  const Axis xaxis = fit_axis(all_x, spec.x_log);
  const Axis yaxis = fit_axis(all_y, spec.y_log);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + xaxis.unit(v) * plot_w; };
  auto py = [&](double v) { return kTop + (1.0 - yaxis.unit(v)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(kWidth)
      << " " << fmt(kHeight) << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"16\">"
      << spec.title << "</text>\n";

  // axes and grid
  for (double t : axis_ticks(xaxis)) {
    const double x = px(t);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(kTop + plot_h) << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t) << "</text>\n";
  }
  for (double t : axis_ticks(yaxis)) {
    const double y = py(t);
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(y) << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t) << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
      << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << spec.x_label << "</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << fmt(kTop + plot_h / 2) << ")\">" << spec.y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (!s.lo.empty() && s.lo.size() == s.y.size() && s.hi.size() == s.y.size()) {
      svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" "
             "points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        svg << fmt(px(s.x[i])) << "," << fmt(py(s.hi[i])) << " ";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        svg << fmt(px(s.x[i])) << "," << fmt(py(s.lo[i])) << " ";
      }
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" "
           "points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
    }
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    // legend entry
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(si);
    svg << "<rect x=\"" << fmt(kLeft + plot_w - 150) << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << fmt(kLeft + plot_w - 136) << "\" y=\"" << fmt(ly)
        << "\" font-size=\"12\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit_plots(const std::vector<AggregateRecord>& aggregates,
                                    const std::string& dir) {
  std::vector<std::string> written;
  if (aggregates.empty()) {
    std::cerr << "emit_plots: empty aggregate table, nothing to plot\n";
    return written;
  }
  std::filesystem::create_directories(dir);

  // The sweep's per-p experiments fold into one figure over p.
  auto sweep_p = [](const std::string& id, double* p) {
    const std::string prefix = "stochasticity-sweep/p=";
    if (id.rfind(prefix, 0) != 0) return false;
    *p = std::stod(id.substr(prefix.size()));
    return true;
  };

  std::vector<std::string> experiment_order;
  std::map<std::string, std::vector<AggregateRecord>> groups;
  for (const auto& a : aggregates) {
    double p;
    const std::string key = sweep_p(a.experiment, &p) ? "stochasticity-sweep" : a.experiment;
    if (groups.find(key) == groups.end()) experiment_order.push_back(key);
    groups[key].push_back(a);
  }

  for (const auto& key : experiment_order) {
    const auto& rows = groups[key];
    const bool sweep = key == "stochasticity-sweep";

    std::vector<std::string> label_order;
    std::map<std::string, PlotSeries> by_alg;
    for (const auto& a : rows) {
      if (std::isnan(a.mean_msve)) continue;
      if (by_alg.find(a.algorithm) == by_alg.end()) {
        label_order.push_back(a.algorithm);
        by_alg[a.algorithm].label = a.algorithm;
      }
      PlotSeries& s = by_alg[a.algorithm];
      double x = static_cast<double>(a.batch_size);
      if (sweep) {
        double p;
        sweep_p(a.experiment, &p);
        x = p;
      }
      s.x.push_back(x);
      s.y.push_back(a.mean_msve);
      s.lo.push_back(a.ci_low);
      s.hi.push_back(a.ci_high);
    }
    std::vector<PlotSeries> series;
    for (const auto& label : label_order) series.push_back(by_alg[label]);
    if (series.empty()) {
      std::cerr << "emit_plots: no finite aggregates for " << key << ", skipping\n";
      continue;
    }

    PlotSpec spec;
    spec.title = key;
    spec.x_label = sweep ? "slip probability p" : "batch size (episodes)";
    spec.y_label = "mean MSVE (95% CI)";
    spec.x_log = !sweep;
    spec.y_log = true;

    std::string name = key;
    std::replace(name.begin(), name.end(), '/', '_');
    const std::string path = dir + "/plot_" + name + ".svg";
    std::ofstream os(path);
    os << render_series_svg(series, spec);
    written.push_back(path);
  }
  return written;
}

}  // namespace psectd
