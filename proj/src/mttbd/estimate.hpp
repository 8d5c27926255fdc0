#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mttbd/filter.hpp"

namespace mttbd {

// Posterior summary for one target model: the weighted fraction of particles
// in which it is active, and (when declared present) the activity-conditioned
// mean of its continuous state.
struct TargetEstimate {
  double activity_prob = 0.0;
  bool present = false;
  Eigen::VectorXd state;  // empty unless present
};

struct MultiTargetEstimate {
  std::vector<TargetEstimate> targets;

  int present_count() const;
  // 2D positions of the present targets, reading components position_ix and
  // position_iy of each conditional mean. Feed directly into the set metric.
  std::vector<Eigen::Vector2d> positions(int position_ix = 0, int position_iy = 2) const;
};

// MMSE estimates from a weighted particle set. A target is declared present
// when its activity probability is >= 1/2 (ties resolve to present). The
// conditional mean sums w_k x_k over particles with the target active; when
// that probability mass is below `min_mass` there is nothing to condition on
// and the estimate is absent regardless of the threshold.
MultiTargetEstimate estimate(const ParticleSet& set, double threshold = 0.5,
                             double min_mass = 1e-12);

}  // namespace mttbd
