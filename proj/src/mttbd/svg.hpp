#pragma once

#include <string>
#include <vector>

#include "mttbd/report.hpp"
#include "mttbd/sim.hpp"

namespace mttbd {

// Minimal static-plot builder: figures are stacks of panels, panels hold
// series. Rendering is a pure function of the data, so re-rendering a saved
// CSV always produces identical bytes.
struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_err;  // optional symmetric error bars
  std::string color = "#1f6fb2";
  double stroke_width = 1.2;
  bool line = true;
  bool markers = false;
  std::string label;  // legend entry when non-empty
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct Figure {
  std::string title;
  std::vector<Panel> panels;
  int width = 860;
  int panel_height = 240;
};

std::string render_figure(const Figure& fig);

// Figure builders for the three CSV kinds.
Figure truth_figure(const GroundTruth& truth);
Figure track_figure(const RunReport& report);
Figure sweep_figure(const SweepTable& table);

// Reads any saved CSV (truth, track, or sweep — recognized by its version
// line) and writes the corresponding SVG.
void render_plot(const std::string& csv_path, const std::string& svg_path);

}  // namespace mttbd
