#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mttbd/observation.hpp"
#include "mttbd/state_model.hpp"

namespace mttbd {

struct Particle {
  MultiTargetState state;
  double log_weight = 0.0;  // normalized within a ParticleSet; may be -inf
};

struct ParticleSet {
  std::vector<Particle> particles;
  int time_index = 0;

  int size() const { return static_cast<int>(particles.size()); }
  // Linear-domain normalized weights, computed with max subtraction.
  std::vector<double> weights() const;
};

// Per-step diagnostics. log_first_stage_sum is log sum_k p_o(z|s~_k) w_{t-1}^k
// and log_ratio_mean is log (1/n_p) sum_l of the second-stage weight ratios;
// their sum is the filter's marginal-likelihood increment for the step.
struct StepStats {
  double ess = 0.0;
  double log_first_stage_sum = 0.0;
  double log_ratio_mean = 0.0;
  double log_evidence_increment() const { return log_first_stage_sum + log_ratio_mean; }
};

template <class Scalar>
struct BasicFilterConfig {
  int n_particles = 2000;  // n_p
  int n_max = 4;
  TransitionModel transition;
  InitialDistribution initial;
  SuperpositionalModel<Scalar> observation;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const {
    if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (!transition.birth_death.valid())
      throw std::invalid_argument("birth/death probabilities must lie in [0, 1]");
  }
};

using FilterConfig = BasicFilterConfig<double>;

// Raised when every first-stage (or every second-stage) weight vanishes,
// which indicates a misconfigured observation model rather than a state the
// filter can recover from.
class DegenerateLikelihoodError : public std::runtime_error {
 public:
  DegenerateLikelihoodError(int time_index, const std::string& what)
      : std::runtime_error(what), time_index_(time_index) {}
  int time_index() const { return time_index_; }

 private:
  int time_index_ = 0;
};

// Stream tags. Every random draw in a run comes from a stream derived as
// RngStream::derive(seed, {tag, t, k, j}): tag selects the phase, t the time
// step, k the particle (or output slot in the second stage), j the target
// model. The resampling stream is derive(seed, {kStreamResample, t}).
inline constexpr std::uint64_t kStreamInit = 1;
inline constexpr std::uint64_t kStreamFirstStage = 2;
inline constexpr std::uint64_t kStreamResample = 3;
inline constexpr std::uint64_t kStreamSecondStage = 4;

// n_p draws from the initial distribution with uniform weights, time index 0.
template <class Scalar>
ParticleSet initialize(const BasicFilterConfig<Scalar>& config);

// One auxiliary-particle-filter step: per particle, draw auxiliary activity
// flags and continuous states from the transition model, weight by
// p_o(z | s~) times the previous weight, residual-resample parents, redraw
// from each parent's previous state, weight by the likelihood ratio
// p_o(z | s) / p_o(z | s~_parent), then normalize.
template <class Scalar>
ParticleSet step(const ParticleSet& prev, const SignalVector<Scalar>& z,
                 const BasicFilterConfig<Scalar>& config, StepStats* stats = nullptr);

// Residual resampling: index k is emitted floor(n_out * w_k) times, in index
// order, and the remaining slots are drawn from the residual distribution by
// inverse CDF, one uniform per draw (smallest k with u * R < cumsum resid_k).
// weights must sum to 1 within 1e-6.
std::vector<int> residual_resample(std::span<const double> weights, int n_out, RngStream& rng);

}  // namespace mttbd
