#pragma once

// Minimal static SVG charts for eyeballing runs. Numbers always live in the
// CSV/JSON outputs; these are decoration.

#include <string>
#include <vector>

#include "kartel/shapley.hpp"
#include "kartel/simulation.hpp"

namespace kartel::svg {

struct Series {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 420;
};

/// Polyline chart with axes, tick labels and a legend.
std::string line_chart(const std::vector<Series>& series, const ChartOptions& options);

/// Strategy shares over time.
std::string trajectory_chart(const SimulationRun& run, const std::string& title = "Strategy shares");

/// Horizontal waterfall: one bar per contribution, from base to prediction.
std::string waterfall_chart(const ShapleyExplanation& explanation);

/// |phi| per bid position as dots, with the per-position mean marked.
std::string summary_chart(const GlobalSummary& summary);

}  // namespace kartel::svg
