#pragma once

#include <string>
#include <vector>

#include "psectd/experiment.hpp"

namespace psectd {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  // CI band, same length as y
  std::vector<double> hi;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool x_log = true;
  bool y_log = true;
};

/// Self-contained SVG: mean polyline with CI band per series, log-scaled axes
/// where requested. Non-positive values are clamped to 1e-16 on log axes.
/// Deterministic byte-for-byte for identical inputs.
std::string render_series_svg(const std::vector<PlotSeries>& series,
                              const PlotSpec& spec);

/// One SVG per experiment in the aggregate table (the stochasticity sweep's
/// per-p experiments collapse into a single MSVE-vs-p figure). Returns the
/// paths written; empty input writes nothing and warns on stderr.
std::vector<std::string> emit_plots(const std::vector<AggregateRecord>& aggregates,
                                    const std::string& dir);

}  // namespace psectd
