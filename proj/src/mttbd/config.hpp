#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mttbd/errors.hpp"
#include "mttbd/filter.hpp"
#include "mttbd/sim.hpp"

namespace mttbd {

// Everything needed to reproduce an experiment, parsed from a key = value
// configuration file ('#' starts a comment; lists are comma-separated).
// Defaults are the reference experiment: four targets appearing and
// disappearing on a 20 m square region watched by a 24-node RF network.
struct ExperimentConfig {
  double region_min_x = 0.0;
  double region_max_x = 20.0;
  double region_min_y = 0.0;
  double region_max_y = 20.0;
  int n_nodes = 24;
  double signal_amplitude = 5.0;  // phi
  double signal_decay = 0.2;      // sigma_h [m]
  double sampling_period = 0.25;  // T [s]
  double process_noise = 0.35;    // Sigma_w = process_noise * I2
  double birth_prob = 0.2;        // pi_b
  double death_prob = 0.1;        // pi_d
  int n_steps = 200;
  std::vector<int> birth_steps{1, 40, 80, 120};
  std::vector<int> death_steps{140, 160, 180};
  double snr_db = -5.0;
  std::uint64_t seed = 1;
  int n_particles = 2000;
  int n_max = 4;
  int threads = 1;  // 0 = all hardware threads
  double ospa_cutoff = 5.0;
  double ospa_order = 1.0;
  double activity_threshold = 0.5;
  bool reflect_boundary = true;
  std::vector<double> snr_list{-10.0, -5.0, 0.0, 5.0, 10.0};  // sweep points
  int n_trials = 100;                                         // trials per sweep point

  // Parses a whole file; `source` names it in diagnostics ("source:line: ...").
  static ExperimentConfig parse(const std::string& text, const std::string& source);
  static ExperimentConfig load(const std::string& path);

  // Sets/reads one field by its configuration key. Throws ConfigError for
  // unknown keys or unparseable values.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static std::vector<std::string> keys();

  // Fixed-order key=value rendering; equal configurations render to equal
  // bytes regardless of input formatting. The hash in every emitted file
  // header is FNV-1a over this text.
  std::string canonical_text() const;
  std::uint64_t hash() const;

  void validate() const;  // throws ConfigError
  Scenario scenario() const;
  // Filter matching the scenario's dynamics/birth model, observing through
  // the scenario's network at the given noise level.
  FilterConfig filter_config(const Scenario& scn, double sigma_v) const;
};

// FNV-1a over a byte string; stable across platforms.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace mttbd
