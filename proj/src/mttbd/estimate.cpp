#include "mttbd/estimate.hpp"

#include <stdexcept>

namespace mttbd {

int MultiTargetEstimate::present_count() const {
  int n = 0;
  for (const auto& t : targets) n += t.present ? 1 : 0;
  return n;
}

std::vector<Eigen::Vector2d> MultiTargetEstimate::positions(int position_ix,
                                                            int position_iy) const {
  std::vector<Eigen::Vector2d> out;
  out.reserve(targets.size());
  for (const auto& t : targets) {
    if (!t.present) continue;
    out.emplace_back(t.state(position_ix), t.state(position_iy));
  }
  return out;
}

MultiTargetEstimate estimate(const ParticleSet& set, double threshold, double min_mass) {
  if (set.particles.empty()) throw std::invalid_argument("estimate: empty particle set");
  const std::vector<double> w = set.weights();
  const int n_max = set.particles.front().state.size();
  for (const auto& p : set.particles)
    if (p.state.size() != n_max)
      throw std::invalid_argument("estimate: inconsistent target counts across particles");

  MultiTargetEstimate out;
  out.targets.resize(n_max);
  for (int j = 0; j < n_max; ++j) {
    TargetEstimate& est = out.targets[j];
    double mass = 0.0;
    Eigen::VectorXd sum;
    for (int k = 0; k < set.size(); ++k) {
      const TargetState& tgt = set.particles[k].state.targets[j];
      if (!tgt.active) continue;
      mass += w[k];
      if (sum.size() == 0) sum = Eigen::VectorXd::Zero(tgt.x.size());
      sum += w[k] * tgt.x;
    }
    est.activity_prob = mass;
    est.present = mass >= threshold && mass >= min_mass;
    if (est.present) est.state = sum / mass;
  }
  return out;
}

}  // namespace mttbd
