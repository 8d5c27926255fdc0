#include "mttbd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "mttbd/errors.hpp"

namespace mttbd {

namespace {

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#3a9d5d", "#8c5fb0",
                          "#c98a2b", "#3aa3a0", "#7a6a52", "#5b6ee1"};
constexpr int kPaletteSize = 8;

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmtg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Bounds {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void finalize() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
      return;
    }
    if (hi == lo) {
      lo -= 1.0;
      hi += 1.0;
      return;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

double nice_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double n = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
  return n * mag;
}

std::vector<double> ticks(const Bounds& b) {
  std::vector<double> out;
  const double step = nice_step(b.hi - b.lo);
  const double eps = 1e-9 * (b.hi - b.lo);
  for (double v = std::ceil(b.lo / step) * step; v <= b.hi + eps; v += step)
    out.push_back(std::abs(v) < eps ? 0.0 : v);
  return out;
}

struct Viewport {
  double x0, y0, w, h;  // plot area in page coordinates
  Bounds bx, by;

  double px(double x) const { return x0 + (x - bx.lo) / (bx.hi - bx.lo) * w; }
  double py(double y) const { return y0 + h - (y - by.lo) / (by.hi - by.lo) * h; }
};

void render_series(std::string& out, const Viewport& vp, const Series& s) {
  const std::size_t n = std::min(s.x.size(), s.y.size());
  if (s.line) {
    // NaN samples break the polyline into segments.
    std::string pts;
    int count = 0;
    auto flush = [&]() {
      if (count >= 2)
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" +
               fmt2(s.stroke_width) + "\" points=\"" + pts + "\"/>\n";
      pts.clear();
      count = 0;
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += " ";
      pts += fmt2(vp.px(s.x[i])) + "," + fmt2(vp.py(s.y[i]));
      ++count;
    }
    flush();
  }
  if (s.markers || !s.line) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out += "<circle cx=\"" + fmt2(vp.px(s.x[i])) + "\" cy=\"" + fmt2(vp.py(s.y[i])) +
             "\" r=\"2.2\" fill=\"" + s.color + "\"/>\n";
    }
  }
  if (!s.y_err.empty()) {
    for (std::size_t i = 0; i < n && i < s.y_err.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || !std::isfinite(s.y_err[i])) continue;
      const double x = vp.px(s.x[i]);
      const double yl = vp.py(s.y[i] - s.y_err[i]);
      const double yh = vp.py(s.y[i] + s.y_err[i]);
      out += "<line x1=\"" + fmt2(x) + "\" y1=\"" + fmt2(yl) + "\" x2=\"" + fmt2(x) + "\" y2=\"" +
             fmt2(yh) + "\" stroke=\"" + s.color + "\" stroke-width=\"1\"/>\n";
      for (double yy : {yl, yh})
        out += "<line x1=\"" + fmt2(x - 4) + "\" y1=\"" + fmt2(yy) + "\" x2=\"" + fmt2(x + 4) +
               "\" y2=\"" + fmt2(yy) + "\" stroke=\"" + s.color + "\" stroke-width=\"1\"/>\n";
    }
  }
}

}  // namespace

std::string render_figure(const Figure& fig) {
  const double margin_left = 62, margin_right = 18, margin_top = 34, margin_bottom = 44;
  const double title_space = fig.title.empty() ? 0 : 28;
  const double total_h = title_space + fig.panels.size() * fig.panel_height;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(fig.width) +
         "\" height=\"" + fmt2(total_h) + "\" viewBox=\"0 0 " + std::to_string(fig.width) + " " +
         fmt2(total_h) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!fig.title.empty())
    out += "<text x=\"" + fmt2(fig.width / 2.0) +
           "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" "
           "font-weight=\"bold\">" +
           fig.title + "</text>\n";

  for (std::size_t p = 0; p < fig.panels.size(); ++p) {
    const Panel& panel = fig.panels[p];
    Viewport vp;
    vp.x0 = margin_left;
    vp.y0 = title_space + p * fig.panel_height + margin_top;
    vp.w = fig.width - margin_left - margin_right;
    vp.h = fig.panel_height - margin_top - margin_bottom;
    for (const Series& s : panel.series) {
      for (double v : s.x) vp.bx.add(v);
      for (std::size_t i = 0; i < s.y.size(); ++i) {
        vp.by.add(s.y[i]);
        if (i < s.y_err.size() && std::isfinite(s.y[i]) && std::isfinite(s.y_err[i])) {
          vp.by.add(s.y[i] - s.y_err[i]);
          vp.by.add(s.y[i] + s.y_err[i]);
        }
      }
    }
    vp.bx.finalize();
    vp.by.finalize();

    // frame and grid
    out += "<rect x=\"" + fmt2(vp.x0) + "\" y=\"" + fmt2(vp.y0) + "\" width=\"" + fmt2(vp.w) +
           "\" height=\"" + fmt2(vp.h) + "\" fill=\"none\" stroke=\"#444444\"/>\n";
    for (double tx : ticks(vp.bx)) {
      const double x = vp.px(tx);
      out += "<line x1=\"" + fmt2(x) + "\" y1=\"" + fmt2(vp.y0) + "\" x2=\"" + fmt2(x) +
             "\" y2=\"" + fmt2(vp.y0 + vp.h) + "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
      out += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(vp.y0 + vp.h + 16) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + fmtg(tx) +
             "</text>\n";
    }
    for (double ty : ticks(vp.by)) {
      const double y = vp.py(ty);
      out += "<line x1=\"" + fmt2(vp.x0) + "\" y1=\"" + fmt2(y) + "\" x2=\"" +
             fmt2(vp.x0 + vp.w) + "\" y2=\"" + fmt2(y) +
             "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
      out += "<text x=\"" + fmt2(vp.x0 - 6) + "\" y=\"" + fmt2(y + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmtg(ty) +
             "</text>\n";
    }
    if (!panel.title.empty())
      out += "<text x=\"" + fmt2(vp.x0) + "\" y=\"" + fmt2(vp.y0 - 10) +
             "\" font-family=\"sans-serif\" font-size=\"13\" font-weight=\"bold\">" + panel.title +
             "</text>\n";
    if (!panel.x_label.empty())
      out += "<text x=\"" + fmt2(vp.x0 + vp.w / 2) + "\" y=\"" + fmt2(vp.y0 + vp.h + 34) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
             panel.x_label + "</text>\n";
    if (!panel.y_label.empty())
      out += "<text x=\"" + fmt2(vp.x0 - 46) + "\" y=\"" + fmt2(vp.y0 + vp.h / 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
             "transform=\"rotate(-90 " +
             fmt2(vp.x0 - 46) + " " + fmt2(vp.y0 + vp.h / 2) + ")\">" + panel.y_label +
             "</text>\n";

    for (const Series& s : panel.series) render_series(out, vp, s);

    // legend, top-right inside the frame
    double ly = vp.y0 + 14;
    for (const Series& s : panel.series) {
      if (s.label.empty()) continue;
      const double lx = vp.x0 + vp.w - 150;
      out += "<line x1=\"" + fmt2(lx) + "\" y1=\"" + fmt2(ly - 4) + "\" x2=\"" + fmt2(lx + 22) +
             "\" y2=\"" + fmt2(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
      out += "<text x=\"" + fmt2(lx + 28) + "\" y=\"" + fmt2(ly) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label + "</text>\n";
      ly += 15;
    }
  }
  out += "</svg>\n";
  return out;
}

Figure truth_figure(const GroundTruth& truth) {
  Figure fig;
  fig.title = "Simulated data";
  Panel signals;
  signals.title = "Observed link signals";
  signals.x_label = "time step";
  signals.y_label = "signal";
  const int n_z = truth.n_z();
  const int n_shown = std::min(8, n_z);
  for (int i = 0; i < n_shown; ++i) {
    const int link = n_shown > 1 ? i * (n_z - 1) / (n_shown - 1) : 0;
    Series s;
    s.color = kPalette[i % kPaletteSize];
    s.stroke_width = 0.9;
    s.label = "link " + std::to_string(link);
    for (int t = 1; t <= truth.n_steps(); ++t) {
      s.x.push_back(t);
      s.y.push_back(truth.observation(t)(link));
    }
    signals.series.push_back(std::move(s));
  }
  fig.panels.push_back(std::move(signals));

  Panel count;
  count.title = "Active targets";
  count.x_label = "time step";
  count.y_label = "count";
  Series s;
  s.color = "#d1495b";
  for (int t = 1; t <= truth.n_steps(); ++t) {
    s.x.push_back(t);
    s.y.push_back(truth.active_count(t));
  }
  count.series.push_back(std::move(s));
  fig.panels.push_back(std::move(count));
  return fig;
}

Figure track_figure(const RunReport& report) {
  Figure fig;
  fig.title = "Tracking results";

  // Truth trajectories as lines, estimates as dots, one panel per coordinate.
  for (int coord = 0; coord < 2; ++coord) {
    Panel panel;
    panel.title = coord == 0 ? "x position" : "y position";
    panel.x_label = "time step";
    panel.y_label = coord == 0 ? "x [m]" : "y [m]";
    for (int j = 0; j < report.n_truth; ++j) {
      Series s;
      s.color = kPalette[j % kPaletteSize];
      s.stroke_width = 1.6;
      s.label = "truth " + std::to_string(j);
      for (const StepRecord& rec : report.steps) {
        s.x.push_back(rec.t);
        s.y.push_back(rec.truth_pos[j](coord));
      }
      panel.series.push_back(std::move(s));
    }
    Series est;
    est.color = "#333333";
    est.line = false;
    est.markers = true;
    est.label = "estimates";
    for (const StepRecord& rec : report.steps)
      for (int j = 0; j < report.n_max; ++j) {
        if (!rec.present[j]) continue;
        est.x.push_back(rec.t);
        est.y.push_back(rec.mean[j](coord == 0 ? 0 : 2));
      }
    panel.series.push_back(std::move(est));
    fig.panels.push_back(std::move(panel));
  }

  Panel count;
  count.title = "Number of targets";
  count.x_label = "time step";
  count.y_label = "count";
  Series truth_n, est_n;
  truth_n.color = "#d1495b";
  truth_n.stroke_width = 1.8;
  truth_n.label = "truth";
  est_n.color = "#1f6fb2";
  est_n.label = "estimated";
  for (const StepRecord& rec : report.steps) {
    truth_n.x.push_back(rec.t);
    truth_n.y.push_back(rec.truth_count);
    est_n.x.push_back(rec.t);
    est_n.y.push_back(rec.estimated_count);
  }
  count.series.push_back(std::move(truth_n));
  count.series.push_back(std::move(est_n));
  fig.panels.push_back(std::move(count));

  Panel ospa_panel;
  ospa_panel.title = "Distance between truth and estimate sets";
  ospa_panel.x_label = "time step";
  ospa_panel.y_label = "ospa [m]";
  Series o;
  o.color = "#3a9d5d";
  for (const StepRecord& rec : report.steps) {
    o.x.push_back(rec.t);
    o.y.push_back(rec.ospa);
  }
  ospa_panel.series.push_back(std::move(o));
  fig.panels.push_back(std::move(ospa_panel));
  return fig;
}

Figure sweep_figure(const SweepTable& table) {
  Figure fig;
  fig.title = "Tracking error versus SNR";
  Panel panel;
  panel.x_label = "SNR [dB]";
  panel.y_label = "time-averaged ospa [m]";
  Series s;
  s.color = "#1f6fb2";
  s.markers = true;
  s.label = "mean +/- std";
  for (const SweepRow& row : table.rows) {
    s.x.push_back(row.snr_db);
    s.y.push_back(row.mean_ospa);
    s.y_err.push_back(row.std_ospa);
  }
  panel.series.push_back(std::move(s));
  fig.panels.push_back(std::move(panel));
  fig.panel_height = 320;
  return fig;
}

void render_plot(const std::string& csv_path, const std::string& svg_path) {
  std::ifstream file(csv_path, std::ios::binary);
  if (!file) throw IoError("cannot open: " + csv_path);
  std::string first_line;
  std::getline(file, first_line);
  file.close();
  if (!first_line.empty() && first_line.back() == '\r') first_line.pop_back();

  std::string svg;
  if (first_line == "# mttbd-truth v1")
    svg = render_figure(truth_figure(load_truth(csv_path).truth));
  else if (first_line == "# mttbd-track v1")
    svg = render_figure(track_figure(load_report(csv_path)));
  else if (first_line == "# mttbd-sweep v1")
    svg = render_figure(sweep_figure(load_sweep(csv_path)));
  else
    throw IoError(csv_path + ": not a recognized data file");

  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + svg_path);
  out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  if (!out) throw IoError("write failed: " + svg_path);
}

}  // namespace mttbd
