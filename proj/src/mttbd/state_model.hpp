#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "mttbd/rng.hpp"

namespace mttbd {

// Two-state Markov chain governing whether a target model is active.
// Row convention: from inactive {1-pi_b, pi_b}, from active {pi_d, 1-pi_d}.
struct BirthDeathMatrix {
  double birth_prob = 0.0;  // pi_b
  double death_prob = 0.0;  // pi_d
  bool valid() const {
    return birth_prob >= 0.0 && birth_prob <= 1.0 && death_prob >= 0.0 && death_prob <= 1.0;
  }
};

struct TargetState {
  Eigen::VectorXd x;     // continuous state, length n_x
  bool active = false;
};

// Hybrid state of all n_max target models. The continuous state of an
// inactive model is carried along unchanged and must never be read while the
// model is inactive.
struct MultiTargetState {
  std::vector<TargetState> targets;
  int size() const { return static_cast<int>(targets.size()); }
  int active_count() const {
    int n = 0;
    for (const auto& t : targets) n += t.active ? 1 : 0;
    return n;
  }
};

using StateSampler = std::function<Eigen::VectorXd(RngStream&)>;
using ConditionalStateSampler = std::function<Eigen::VectorXd(const Eigen::VectorXd&, RngStream&)>;

// Per-target transition: the activity chain plus the survival density
// p_s(x_t | x_{t-1}) and birth density p_b(x_t). No density is attached to
// the inactive case; it is never sampled.
struct TransitionModel {
  BirthDeathMatrix birth_death;
  ConditionalStateSampler survival;
  StateSampler birth;
};

struct InitialDistribution {
  StateSampler state;
  double activity_prob = 0.0;  // P(a_{j0} = 1)
};

// One uniform draw u: an inactive model becomes active iff u < pi_b, an
// active model dies iff u < pi_d. This convention is part of the
// reproducibility contract.
bool sample_activity_transition(bool prev_active, const BirthDeathMatrix& m, RngStream& rng);

// Case table: (new, prev) = (1,1) draws survival, (1,0) draws birth, and an
// inactive outcome returns prev unchanged without consuming randomness.
Eigen::VectorXd sample_continuous_transition(const Eigen::VectorXd& prev, bool prev_active,
                                             bool new_active, const TransitionModel& model,
                                             RngStream& rng);

// Factorized joint transition: target model j consumes the child stream
// rng.split(j), drawing its activity flag first and continuous state second.
MultiTargetState sample_joint_transition(const MultiTargetState& prev, const TransitionModel& model,
                                         RngStream& rng);

// Independent per-target draws from the initial distribution, same stream
// conventions as sample_joint_transition.
MultiTargetState sample_initial(int n_max, const InitialDistribution& init, RngStream& rng);

// x' = F x + G w with w ~ N(0, noise_cov)
ConditionalStateSampler make_linear_gaussian_survival(const Eigen::MatrixXd& F,
                                                      const Eigen::MatrixXd& G,
                                                      const Eigen::MatrixXd& noise_cov);

}  // namespace mttbd
