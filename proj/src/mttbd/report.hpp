#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mttbd/config.hpp"
#include "mttbd/sim.hpp"

namespace mttbd {

// One filter step's worth of results. Per-target vectors have one entry per
// filter target model; truth_pos has one entry per truth target (NaN when
// that target is inactive) so plots can draw continuous true trajectories.
struct StepRecord {
  int t = 0;
  int truth_count = 0;
  int estimated_count = 0;
  double ospa = 0.0;
  double ess = 0.0;
  std::vector<double> activity_prob;
  std::vector<char> present;
  std::vector<Eigen::Vector4d> mean;  // NaN when not present
  std::vector<Eigen::Vector2d> truth_pos;
};

struct RunReport {
  std::vector<StepRecord> steps;
  double time_avg_ospa = 0.0;
  double sigma_v = 0.0;
  double requested_snr_db = 0.0;
  double realized_snr_db = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int n_max = 0;
  int n_truth = 0;
  // Wall-clock duration of the filtering loop. Reported on the console only;
  // never serialized, so saved reports stay byte-identical across runs.
  double wall_seconds = 0.0;
};

struct SweepRow {
  double snr_db = 0.0;
  int n_trials = 0;
  double mean_ospa = 0.0;
  double std_ospa = 0.0;  // sample standard deviation across trials; 0 for one trial
  double mean_realized_snr_db = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;  // console-only, as above
};

// Generates truth from the configuration, runs the filter over all steps,
// and scores each step's estimate against the truth positions.
RunReport run_trial(const ExperimentConfig& cfg);

// Same, but against existing data (replay): the filter and scoring use
// `truth` instead of freshly generated data. The configuration must describe
// the same network geometry (n_z must match).
RunReport run_trial(const ExperimentConfig& cfg, const GroundTruth& truth);

// cfg.n_trials independent trials at every SNR in cfg.snr_list. Trial
// (snr index s, trial i) runs single-threaded under seed
// derive(cfg.seed, {kStreamSweepTrial, s, i}); cfg.threads controls how many
// trials run concurrently, and rows are assembled in (s, i) order, so the
// table does not depend on the thread count.
SweepTable run_sweep(const ExperimentConfig& cfg);

inline constexpr std::uint64_t kStreamSweepTrial = 18;

// Versioned CSV serialization, byte-stable for a given report.
void save_report(const RunReport& report, const std::string& path);
RunReport load_report(const std::string& path);
void save_sweep(const SweepTable& table, const std::string& path);
SweepTable load_sweep(const std::string& path);

}  // namespace mttbd
