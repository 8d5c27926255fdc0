#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mttbd/errors.hpp"
#include "mttbd/rng.hpp"
#include "mttbd/sim.hpp"

using namespace mttbd;

namespace {

Scenario small_scenario(std::uint64_t seed = 5) {
  Scenario scn;
  scn.network = build_network(scn.region, 6);
  scn.dynamics = make_cv_dynamics(0.25, 0.35);
  scn.schedule = ActivitySchedule::from_events(30, {1, 10}, {20});
  scn.n_steps = 30;
  scn.snr_db = -5.0;
  scn.seed = seed;
  return scn;
}

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
           ("mttbd_sim_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("perimeter networks have evenly spaced nodes and all-pairs links") {
  const Region region;  // [0,20] x [0,20]
  const RfNetwork net = build_network(region, 24);
  REQUIRE(static_cast<int>(net.nodes.size()) == 24);
  CHECK(net.n_z() == 276);  // 24 * 23 / 2
  CHECK(static_cast<int>(net.links.size()) == 276);

  // Walk starts at the origin corner and proceeds along the bottom edge.
  CHECK(net.nodes[0].x() == doctest::Approx(0.0));
  CHECK(net.nodes[0].y() == doctest::Approx(0.0));
  CHECK(net.nodes[1].x() == doctest::Approx(80.0 / 24.0));
  CHECK(net.nodes[1].y() == doctest::Approx(0.0));

  // The perimeter is 80 m, so every fourth-of-perimeter lands on a corner.
  CHECK(net.nodes[6].x() == doctest::Approx(20.0));
  CHECK(net.nodes[6].y() == doctest::Approx(0.0));
  CHECK(net.nodes[12].x() == doctest::Approx(20.0));
  CHECK(net.nodes[12].y() == doctest::Approx(20.0));
  CHECK(net.nodes[18].x() == doctest::Approx(0.0));
  CHECK(net.nodes[18].y() == doctest::Approx(20.0));

  // Every node sits on the boundary and consecutive nodes are equidistant
  // along it (same straight-line distance while on one edge).
  for (const auto& p : net.nodes) {
    const bool on_x_edge = p.x() == doctest::Approx(0.0) || p.x() == doctest::Approx(20.0);
    const bool on_y_edge = p.y() == doctest::Approx(0.0) || p.y() == doctest::Approx(20.0);
    CHECK((on_x_edge || on_y_edge));
    CHECK(region.contains(p.x(), p.y()));
  }

  // All unordered pairs, each exactly once, ordered lexicographically.
  CHECK(net.links.front() == std::pair<int, int>{0, 1});
  CHECK(net.links.back() == std::pair<int, int>{22, 23});
  for (const auto& [a, b] : net.links) CHECK(a < b);
}

TEST_CASE("a four-node network is exactly the corners") {
  const RfNetwork net = build_network(Region{}, 4);
  REQUIRE(net.nodes.size() == 4);
  CHECK(net.nodes[0].isApprox(Eigen::Vector2d(0, 0)));
  CHECK(net.nodes[1].isApprox(Eigen::Vector2d(20, 0)));
  CHECK(net.nodes[2].isApprox(Eigen::Vector2d(20, 20)));
  CHECK(net.nodes[3].isApprox(Eigen::Vector2d(0, 20)));
  CHECK(net.n_z() == 6);
}

TEST_CASE("constant-velocity dynamics have the standard block structure") {
  const double T = 0.25;
  const Dynamics dyn = make_cv_dynamics(T, 0.35);
  Eigen::Matrix4d F_expected;
  F_expected << 1, T, 0, 0,
                0, 1, 0, 0,
                0, 0, 1, T,
                0, 0, 0, 1;
  CHECK(dyn.F.isApprox(F_expected));
  Eigen::Matrix<double, 4, 2> G_expected;
  G_expected << T * T / 2, 0,
                T, 0,
                0, T * T / 2,
                0, T;
  CHECK(dyn.G.isApprox(G_expected));
  CHECK(dyn.process_noise_cov.isApprox(0.35 * Eigen::Matrix2d::Identity()));
  CHECK(dyn.sampling_period == T);
  CHECK_NOTHROW(dyn.validate());
  CHECK_THROWS_AS(make_cv_dynamics(0.0, 0.35), std::invalid_argument);
  CHECK_THROWS_AS(make_cv_dynamics(0.25, -1.0), std::invalid_argument);
}

TEST_CASE("event lists expand to the expected activity schedule") {
  const ActivitySchedule s =
      ActivitySchedule::from_events(200, {1, 40, 80, 120}, {140, 160, 180});
  CHECK(s.n_steps() == 200);
  CHECK(s.n_targets() == 4);

  // Births and deaths pair up in order; the unmatched birth survives to the
  // end. A target is active on [birth, death).
  CHECK(s.active(1, 0));
  CHECK(!s.active(1, 1));
  CHECK(s.active(40, 1));
  CHECK(s.active(139, 0));
  CHECK(!s.active(140, 0));
  CHECK(s.active(159, 1));
  CHECK(!s.active(160, 1));
  CHECK(!s.active(180, 2));
  CHECK(s.active(200, 3));

  CHECK(s.active_count(1) == 1);
  CHECK(s.active_count(39) == 1);
  CHECK(s.active_count(40) == 2);
  CHECK(s.active_count(130) == 4);
  CHECK(s.active_count(140) == 3);
  CHECK(s.active_count(200) == 1);
  CHECK(!s.all_inactive());
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("event lists are validated") {
  CHECK_THROWS_AS(ActivitySchedule::from_events(0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ActivitySchedule::from_events(10, {1}, {5, 7}), std::invalid_argument);
  CHECK_THROWS_AS(ActivitySchedule::from_events(10, {0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ActivitySchedule::from_events(10, {11}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ActivitySchedule::from_events(10, {5}, {5}), std::invalid_argument);
  CHECK_THROWS_AS(ActivitySchedule::from_events(10, {5}, {3}), std::invalid_argument);

  // An empty schedule is structurally fine (no targets at all).
  const ActivitySchedule empty = ActivitySchedule::from_events(10, {}, {});
  CHECK(empty.n_targets() == 0);
  CHECK(empty.all_inactive());

  ActivitySchedule ragged;
  ragged.rows = {{1, 0}, {1}};
  CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);
}

TEST_CASE("ground truth follows the schedule and calibrates its noise") {
  const Scenario scn = small_scenario();
  const GroundTruth truth = generate_truth(scn);

  CHECK(truth.n_steps() == 30);
  CHECK(truth.n_targets() == 2);
  CHECK(truth.n_z() == scn.network.n_z());
  CHECK(truth.requested_snr_db == -5.0);
  CHECK(truth.sigma_v > 0.0);

  for (int t = 1; t <= 30; ++t) {
    for (int j = 0; j < 2; ++j) {
      CHECK(truth.active(t, j) == scn.schedule.active(t, j));
      const Eigen::Vector4d& x = truth.states[t - 1][j];
      if (truth.active(t, j)) {
        CHECK(x.allFinite());
        // Reflection keeps active targets inside the region.
        CHECK(scn.region.contains(x(0), x(2)));
      } else {
        CHECK(std::isnan(x(0)));
      }
    }
    CHECK(truth.observation(t).size() == scn.network.n_z());
    CHECK(static_cast<int>(truth.active_positions(t).size()) == truth.active_count(t));
  }

  // Small sample, so allow a generous band around the requested value.
  CHECK(std::abs(truth.realized_snr_db - truth.requested_snr_db) < 1.5);
}

TEST_CASE("truth generation is reproducible and seed-sensitive") {
  const GroundTruth a = generate_truth(small_scenario(5));
  const GroundTruth b = generate_truth(small_scenario(5));
  const GroundTruth c = generate_truth(small_scenario(6));

  bool same = true, differs = false;
  for (int t = 1; t <= a.n_steps(); ++t) {
    for (Eigen::Index i = 0; i < a.observation(t).size(); ++i) {
      same = same && a.observation(t)(i) == b.observation(t)(i);
      differs = differs || a.observation(t)(i) != c.observation(t)(i);
    }
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("each truth target owns a stream independent of the others") {
  // Adding a second target must not perturb the first target's trajectory.
  Scenario one = small_scenario(9);
  one.schedule = ActivitySchedule::from_events(30, {1}, {});
  Scenario two = small_scenario(9);
  two.schedule = ActivitySchedule::from_events(30, {1, 10}, {});

  const GroundTruth ta = generate_truth(one);
  const GroundTruth tb = generate_truth(two);
  for (int t = 1; t <= 30; ++t) {
    for (int i = 0; i < 4; ++i)
      CHECK(ta.states[t - 1][0](i) == tb.states[t - 1][0](i));
  }
}

TEST_CASE("survivor propagation matches the linear dynamics") {
  // Huge region and reflection disabled: x_t - F x_{t-1} must be G w with
  // w ~ N(0, q I). Verified on the first propagation step across many seeds.
  Scenario scn;
  scn.region = {0.0, 2000.0, 0.0, 2000.0};
  // Huge decay scale: signals stay well away from underflow even at these
  // distances, keeping the noise calibration happy.
  scn.network = build_network(scn.region, 4, 5.0, 1e9);
  scn.dynamics = make_cv_dynamics(0.25, 0.35);
  scn.schedule = ActivitySchedule::from_events(2, {1}, {});
  scn.n_steps = 2;
  scn.reflect_boundary = false;

  const Eigen::Matrix4d cov_expected =
      scn.dynamics.G * scn.dynamics.process_noise_cov * scn.dynamics.G.transpose();

  const int n = 20000;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d outer = Eigen::Matrix4d::Zero();
  for (int r = 0; r < n; ++r) {
    scn.seed = 100 + static_cast<std::uint64_t>(r);
    const GroundTruth truth = generate_truth(scn);
    const Eigen::Vector4d d =
        truth.states[1][0] - scn.dynamics.F * truth.states[0][0];
    mean += d;
    outer += d * d.transpose();
  }
  mean /= n;
  const Eigen::Matrix4d cov = outer / n - mean * mean.transpose();
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(mean(i)) < 0.01);
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(cov(i, j) - cov_expected(i, j)) <
            6e-4 + 0.08 * std::abs(cov_expected(i, j)));
  }
}

TEST_CASE("reflection folds positions into the region and flips velocities") {
  const Region region;  // [0,20]^2

  Eigen::Vector4d below(-1.0, -2.0, 5.0, 3.0);
  reflect_into(region, below);
  CHECK(below(0) == doctest::Approx(1.0));
  CHECK(below(1) == doctest::Approx(2.0));
  CHECK(below(2) == doctest::Approx(5.0));
  CHECK(below(3) == doctest::Approx(3.0));

  Eigen::Vector4d above(5.0, 1.0, 21.5, 4.0);
  reflect_into(region, above);
  CHECK(above(2) == doctest::Approx(18.5));
  CHECK(above(3) == doctest::Approx(-4.0));

  // Two folds cancel the velocity flip: 45 -> -5 -> 5.
  Eigen::Vector4d twice(45.0, 3.0, 10.0, 0.0);
  reflect_into(region, twice);
  CHECK(twice(0) == doctest::Approx(5.0));
  CHECK(twice(1) == doctest::Approx(3.0));

  Eigen::Vector4d inside(7.0, -1.0, 13.0, 2.0);
  const Eigen::Vector4d copy = inside;
  reflect_into(region, inside);
  CHECK(inside == copy);
}

TEST_CASE("noise calibration implements the power formula") {
  std::vector<RealSignal> signals(2, RealSignal::Zero(2));
  signals[0] << 1.0, 1.0;  // squared norm 2; the zero step is excluded

  // sigma^2 = mean_power / (n_z * 10^(snr/10)) with mean_power = 2, n_z = 2.
  CHECK(calibrate_noise(signals, 0.0) == doctest::Approx(1.0));
  CHECK(calibrate_noise(signals, -5.0) == doctest::Approx(std::sqrt(std::pow(10.0, 0.5))));
  CHECK(calibrate_noise(signals, 10.0) == doctest::Approx(std::sqrt(0.1)));

  std::vector<RealSignal> zeros(3, RealSignal::Zero(2));
  CHECK_THROWS_AS(calibrate_noise(zeros, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_noise({}, 0.0), std::invalid_argument);
}

TEST_CASE("realized snr compares mean powers over active steps") {
  std::vector<RealSignal> signals(2, RealSignal::Zero(2));
  std::vector<RealSignal> noise(2, RealSignal::Zero(2));
  signals[0] << 2.0, 0.0;
  noise[0] << 1.0, 1.0;
  noise[1] << 100.0, 100.0;  // ignored: its signal step is zero
  CHECK(realized_snr(signals, noise) == doctest::Approx(10.0 * std::log10(2.0)));

  std::vector<RealSignal> none(2, RealSignal::Zero(2));
  CHECK(std::isnan(realized_snr(none, noise)));
  CHECK_THROWS_AS(realized_snr(signals, {}), std::invalid_argument);
}

TEST_CASE("an all-inactive schedule yields unit-noise observations") {
  Scenario scn = small_scenario();
  scn.schedule.rows.assign(30, std::vector<char>(2, 0));
  const GroundTruth truth = generate_truth(scn);
  CHECK(truth.sigma_v == 1.0);
  CHECK(std::isnan(truth.realized_snr_db));
  for (int t = 1; t <= 30; ++t) CHECK(truth.active_count(t) == 0);

  // Observations are then exactly the unit-scale noise draws.
  RngStream rng = RngStream::derive(scn.seed, {kStreamTruthNoise, 1});
  const Eigen::VectorXd draws = rng.normals(scn.network.n_z());
  for (Eigen::Index i = 0; i < draws.size(); ++i)
    CHECK(truth.observation(1)(i) == draws(i));
}

TEST_CASE("scenario transition and initial distribution match the scenario") {
  const Scenario scn = small_scenario();
  const TransitionModel tr = make_scenario_transition(scn);
  const InitialDistribution init = make_scenario_initial(scn);

  CHECK(tr.birth_death.birth_prob == scn.birth_death.birth_prob);
  CHECK(tr.birth_death.death_prob == scn.birth_death.death_prob);
  CHECK(init.activity_prob == 0.0);

  // Births draw positions uniformly inside the region.
  RngStream rng = RngStream::derive(3, {50});
  for (int i = 0; i < 500; ++i) {
    const Eigen::VectorXd x = tr.birth(rng);
    REQUIRE(x.size() == 4);
    CHECK(scn.region.contains(x(0), x(2)));
  }

  // The filter-side survival kernel does not reflect at the boundary: from a
  // state heading out of the region, the propagated mean stays F x.
  Eigen::VectorXd edge(4);
  edge << 0.0, -10.0, 10.0, 0.0;
  const Eigen::Vector4d mean_expected = scn.dynamics.F * edge;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  const int n = 2000;
  for (int i = 0; i < n; ++i) mean += tr.survival(edge, rng);
  mean /= n;
  CHECK(mean(0) == doctest::Approx(mean_expected(0)).epsilon(0.01));  // -2.5, outside
  CHECK(mean(1) == doctest::Approx(-10.0).epsilon(0.01));
}

TEST_CASE("truth files round-trip exactly") {
  const Scenario scn = small_scenario(11);
  const GroundTruth truth = generate_truth(scn);
  TempDir tmp;
  const std::string path = tmp.file("truth.csv");
  save_truth(truth, path, 0xabcdef0123456789ull, scn.seed);

  const LoadedTruth loaded = load_truth(path);
  CHECK(loaded.config_hash == 0xabcdef0123456789ull);
  CHECK(loaded.seed == scn.seed);
  CHECK(loaded.truth.n_steps() == truth.n_steps());
  CHECK(loaded.truth.n_targets() == truth.n_targets());
  CHECK(loaded.truth.sigma_v == truth.sigma_v);
  CHECK(loaded.truth.requested_snr_db == truth.requested_snr_db);
  CHECK(loaded.truth.realized_snr_db == truth.realized_snr_db);
  for (int t = 1; t <= truth.n_steps(); ++t) {
    for (int j = 0; j < truth.n_targets(); ++j) {
      CHECK(loaded.truth.active(t, j) == truth.active(t, j));
      for (int i = 0; i < 4; ++i) {
        const double got = loaded.truth.states[t - 1][j](i);
        const double want = truth.states[t - 1][j](i);
        if (std::isnan(want))
          CHECK(std::isnan(got));
        else
          CHECK(got == want);
      }
    }
    for (Eigen::Index i = 0; i < truth.observation(t).size(); ++i)
      CHECK(loaded.truth.observation(t)(i) == truth.observation(t)(i));
  }

  // Saving the loaded copy reproduces the file byte for byte.
  const std::string path2 = tmp.file("truth2.csv");
  save_truth(loaded.truth, path2, loaded.config_hash, loaded.seed);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("malformed truth files are rejected with io errors") {
  TempDir tmp;
  CHECK_THROWS_AS(load_truth(tmp.file("missing.csv")), IoError);

  const std::string bad = tmp.file("bad.csv");
  std::ofstream(bad) << "not a truth file\n";
  CHECK_THROWS_AS(load_truth(bad), IoError);

  // A valid file with one observation row removed must fail loading.
  const Scenario scn = small_scenario();
  const GroundTruth truth = generate_truth(scn);
  const std::string full = tmp.file("full.csv");
  save_truth(truth, full, 1, 2);
  std::string text = read_file(full);
  const std::size_t cut = text.rfind("obs,");
  text.erase(cut, text.find('\n', cut) - cut + 1);
  const std::string truncated = tmp.file("truncated.csv");
  std::ofstream(truncated, std::ios::binary) << text;
  CHECK_THROWS_AS(load_truth(truncated), IoError);
}

TEST_CASE("scenario validation catches inconsistent setups") {
  Scenario scn = small_scenario();
  scn.n_steps = 31;  // schedule still covers 30
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);

  scn = small_scenario();
  scn.region.x_max = scn.region.x_min;
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);

  scn = small_scenario();
  scn.birth_death.death_prob = -0.5;
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);
}
