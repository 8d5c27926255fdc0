#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "mttbd/errors.hpp"
#include "mttbd/report.hpp"
#include "mttbd/svg.hpp"

using namespace mttbd;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mttbd_svg_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.n_nodes = 6;
  cfg.n_steps = 12;
  cfg.birth_steps = {1, 4};
  cfg.death_steps = {9};
  cfg.snr_db = 5.0;
  cfg.seed = 4;
  cfg.n_particles = 50;
  cfg.n_max = 2;
  cfg.snr_list = {0.0, 5.0};
  cfg.n_trials = 2;
  return cfg;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("figures render to complete svg documents") {
  Figure fig;
  fig.title = "demo";
  Panel panel;
  panel.title = "one series";
  panel.x_label = "step";
  panel.y_label = "value";
  Series s;
  s.x = {1.0, 2.0, 3.0, 4.0};
  s.y = {0.5, 1.5, 1.0, 2.5};
  s.label = "signal";
  panel.series.push_back(s);
  fig.panels.push_back(panel);

  const std::string svg = render_figure(fig);
  CHECK(contains(svg, "<svg"));
  CHECK(contains(svg, "</svg>"));
  CHECK(contains(svg, "demo"));
  CHECK(contains(svg, "one series"));
  CHECK(contains(svg, "signal"));
  CHECK(contains(svg, "polyline"));

  // Rendering is a pure function of the figure.
  CHECK(render_figure(fig) == svg);
}

TEST_CASE("nan samples break lines instead of leaking into coordinates") {
  Figure fig;
  Panel panel;
  Series s;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.x = {1.0, 2.0, 3.0, 4.0, 5.0};
  s.y = {1.0, 2.0, nan, 3.0, 4.0};
  panel.series.push_back(s);
  fig.panels.push_back(panel);

  const std::string svg = render_figure(fig);
  CHECK(!contains(svg, "nan"));
  CHECK(!contains(svg, "NaN"));
  // The gap splits one polyline into two.
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos)
    ++count;
  CHECK(count >= 2);
}

TEST_CASE("error bars are drawn when a series carries them") {
  Figure fig;
  Panel panel;
  Series s;
  s.x = {1.0, 2.0, 3.0};
  s.y = {1.0, 2.0, 1.5};
  s.y_err = {0.2, 0.4, 0.1};
  s.markers = true;
  panel.series.push_back(s);
  fig.panels.push_back(panel);
  const std::string with_err = render_figure(fig);

  panel.series[0].y_err.clear();
  Figure bare;
  bare.panels.push_back(panel);
  const std::string without_err = render_figure(bare);
  CHECK(with_err.size() > without_err.size());
}

TEST_CASE("empty figures still render valid documents") {
  const std::string svg = render_figure(Figure{});
  CHECK(contains(svg, "<svg"));
  CHECK(contains(svg, "</svg>"));

  Figure fig;
  fig.panels.emplace_back();  // panel with no series
  CHECK(contains(render_figure(fig), "</svg>"));
}

TEST_CASE("each data file type renders through its own figure") {
  TempDir tmp;
  const ExperimentConfig cfg = tiny_config();

  const GroundTruth truth = generate_truth(cfg.scenario());
  const std::string truth_svg = render_figure(truth_figure(truth));
  CHECK(contains(truth_svg, "</svg>"));

  const RunReport report = run_trial(cfg);
  const std::string track_svg = render_figure(track_figure(report));
  CHECK(contains(track_svg, "</svg>"));
  CHECK(!contains(track_svg, "nan"));

  const SweepTable table = run_sweep(cfg);
  const std::string sweep_svg = render_figure(sweep_figure(table));
  CHECK(contains(sweep_svg, "</svg>"));
}

TEST_CASE("render_plot detects the input type from the file header") {
  TempDir tmp;
  const ExperimentConfig cfg = tiny_config();

  const GroundTruth truth = generate_truth(cfg.scenario());
  save_truth(truth, tmp.file("truth.csv"), cfg.hash(), cfg.seed);
  render_plot(tmp.file("truth.csv"), tmp.file("truth.svg"));
  CHECK(contains(read_file(tmp.file("truth.svg")), "</svg>"));

  const RunReport report = run_trial(cfg);
  save_report(report, tmp.file("track.csv"));
  render_plot(tmp.file("track.csv"), tmp.file("track.svg"));
  CHECK(contains(read_file(tmp.file("track.svg")), "</svg>"));

  const SweepTable table = run_sweep(cfg);
  save_sweep(table, tmp.file("sweep.csv"));
  render_plot(tmp.file("sweep.csv"), tmp.file("sweep.svg"));
  CHECK(contains(read_file(tmp.file("sweep.svg")), "</svg>"));

  // Re-rendering produces identical bytes.
  render_plot(tmp.file("sweep.csv"), tmp.file("sweep2.svg"));
  CHECK(read_file(tmp.file("sweep.svg")) == read_file(tmp.file("sweep2.svg")));
}

TEST_CASE("unrecognized plot inputs raise io errors") {
  TempDir tmp;
  CHECK_THROWS_AS(render_plot(tmp.file("missing.csv"), tmp.file("out.svg")), IoError);

  const std::string junk = tmp.file("junk.csv");
  std::ofstream(junk) << "t,x,y\n1,2,3\n";
  CHECK_THROWS_AS(render_plot(junk, tmp.file("out.svg")), IoError);
}
