#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mttbd/metrics.hpp"
#include "mttbd/observation.hpp"
#include "mttbd/state_model.hpp"

namespace mttbd {

struct Region {
  double x_min = 0.0, x_max = 20.0;
  double y_min = 0.0, y_max = 20.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double perimeter() const { return 2.0 * (width() + height()); }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  void validate() const;
};

// Constant-velocity kinematics over the state layout (x, vx, y, vy):
// x_t = F x_{t-1} + G w, w ~ N(0, process_noise_cov).
struct Dynamics {
  Eigen::Matrix4d F;
  Eigen::Matrix<double, 4, 2> G;
  double sampling_period = 0.25;          // T [s]
  Eigen::Matrix2d process_noise_cov;      // Sigma_w

  void validate() const;
};

// F = I2 (x) [[1, T], [0, 1]], G = I2 (x) [T^2/2; T], Sigma_w = sigma_w * I2.
Dynamics make_cv_dynamics(double sampling_period, double process_noise);

// Deterministic ground-truth activity: rows[t-1][j] says whether truth
// target j is active at step t (steps are 1-based; step t produces the t-th
// observation).
struct ActivitySchedule {
  std::vector<std::vector<char>> rows;

  int n_steps() const { return static_cast<int>(rows.size()); }
  int n_targets() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }
  bool active(int t, int j) const { return rows[t - 1][j] != 0; }
  int active_count(int t) const;
  bool all_inactive() const;
  void validate() const;  // rectangular rows

  // Target j activates at birth_steps[j] and deactivates at death_steps[j]
  // (active on [birth, death)); targets with no paired death survive to the
  // end. Steps are 1-based and each death must follow its birth.
  static ActivitySchedule from_events(int n_steps, const std::vector<int>& birth_steps,
                                      const std::vector<int>& death_steps);
};

struct Scenario {
  Region region;
  RfNetwork network;
  Dynamics dynamics;
  BirthDeathMatrix birth_death{0.2, 0.1};
  ActivitySchedule schedule;
  int n_steps = 200;
  double snr_db = -5.0;
  std::uint64_t seed = 0;
  bool reflect_boundary = true;  // fold truth trajectories back into the region

  void validate() const;
};

// Simulated experiment data: truth states and activity per step, the noisy
// observations the filter sees, and the calibrated noise level. Step t
// (1-based) lives at vector index t-1; state entries for inactive (t, j) are
// NaN so accidental use is loud.
struct GroundTruth {
  std::vector<std::vector<Eigen::Vector4d>> states;
  std::vector<std::vector<char>> activity;
  std::vector<Observation> observations;
  double sigma_v = 1.0;
  double requested_snr_db = 0.0;
  double realized_snr_db = 0.0;  // NaN when no step has an active target

  int n_steps() const { return static_cast<int>(observations.size()); }
  int n_targets() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  int n_z() const { return observations.empty() ? 0 : static_cast<int>(observations.front().size()); }
  bool active(int t, int j) const { return activity[t - 1][j] != 0; }
  int active_count(int t) const;
  const Observation& observation(int t) const { return observations[t - 1]; }
  // Positions of the truth targets active at step t; the reference set for
  // the OSPA metric.
  PointSet active_positions(int t) const;
};

// n_a nodes equally spaced along the region perimeter (arc spacing
// perimeter / n_a), starting at (x_min, y_min) and walking counterclockwise;
// links are all unordered node pairs, so n_z = n_a (n_a - 1) / 2.
RfNetwork build_network(const Region& region, int n_a, double amplitude = 5.0,
                        double decay_scale = 0.2);

// sigma_v such that 10 log10(<|s|^2> / <|v|^2>) equals snr_db in expectation:
// sigma_v^2 = <|s_t|^2> / (n_z 10^{snr/10}), the average taken over steps
// with a nonzero summed signal. Throws when every signal is zero.
double calibrate_noise(const std::vector<RealSignal>& signals, double snr_db);

// 10 log10 <|s|^2> - 10 log10 <|v|^2> over steps with a nonzero signal; NaN
// when there are none.
double realized_snr(const std::vector<RealSignal>& signals, const std::vector<RealSignal>& noise);

// Folds a state's position into the region, negating the corresponding
// velocity component on each reflection.
void reflect_into(const Region& region, Eigen::Vector4d& state);

// Simulates the scenario: activity follows the schedule exactly, births draw
// position uniform over the region and velocity N(0, I), survivors propagate
// through the dynamics (reflected at the boundary when enabled), and each
// step's observation adds calibrated Gaussian noise to the summed signal.
GroundTruth generate_truth(const Scenario& scn);

// Transition and initial distribution matching the scenario's dynamics and
// birth density; the initial distribution starts every target model inactive.
TransitionModel make_scenario_transition(const Scenario& scn);
InitialDistribution make_scenario_initial(const Scenario& scn);

// Versioned CSV dump of a GroundTruth for replay, byte-stable for a given
// truth. load_truth round-trips exactly (shortest round-trip formatting).
void save_truth(const GroundTruth& truth, const std::string& path,
                std::uint64_t config_hash, std::uint64_t seed);
struct LoadedTruth {
  GroundTruth truth;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};
LoadedTruth load_truth(const std::string& path);

// Stream tags for truth generation (the filter owns tags 1-4 under the same
// seed, so these must stay distinct).
inline constexpr std::uint64_t kStreamTruthState = 16;
inline constexpr std::uint64_t kStreamTruthNoise = 17;

}  // namespace mttbd
