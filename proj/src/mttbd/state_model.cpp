#include "mttbd/state_model.hpp"

#include <stdexcept>

#include <Eigen/Cholesky>

namespace mttbd {

bool sample_activity_transition(bool prev_active, const BirthDeathMatrix& m, RngStream& rng) {
  if (!m.valid()) throw std::invalid_argument("birth/death probabilities must lie in [0, 1]");
  const double u = rng.uniform01();
  if (!prev_active) return u < m.birth_prob;
  return u < m.death_prob ? false : true;
}

Eigen::VectorXd sample_continuous_transition(const Eigen::VectorXd& prev, bool prev_active,
                                             bool new_active, const TransitionModel& model,
                                             RngStream& rng) {
  if (!new_active) return prev;
  if (prev_active) return model.survival(prev, rng);
  return model.birth(rng);
}

MultiTargetState sample_joint_transition(const MultiTargetState& prev, const TransitionModel& model,
                                         RngStream& rng) {
  MultiTargetState out;
  out.targets.reserve(prev.targets.size());
  for (int j = 0; j < prev.size(); ++j) {
    RngStream sub = rng.split(static_cast<std::uint64_t>(j));
    const TargetState& p = prev.targets[j];
    const bool a = sample_activity_transition(p.active, model.birth_death, sub);
    out.targets.push_back({sample_continuous_transition(p.x, p.active, a, model, sub), a});
  }
  return out;
}

MultiTargetState sample_initial(int n_max, const InitialDistribution& init, RngStream& rng) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  MultiTargetState out;
  out.targets.reserve(n_max);
  for (int j = 0; j < n_max; ++j) {
    RngStream sub = rng.split(static_cast<std::uint64_t>(j));
    const bool a = sub.uniform01() < init.activity_prob;
    out.targets.push_back({init.state(sub), a});
  }
  return out;
}

ConditionalStateSampler make_linear_gaussian_survival(const Eigen::MatrixXd& F,
                                                      const Eigen::MatrixXd& G,
                                                      const Eigen::MatrixXd& noise_cov) {
  if (F.rows() != F.cols()) throw std::invalid_argument("F must be square");
  if (G.rows() != F.rows()) throw std::invalid_argument("G row count must match F");
  if (noise_cov.rows() != G.cols() || noise_cov.cols() != G.cols())
    throw std::invalid_argument("noise covariance must match G column count");
  Eigen::LLT<Eigen::MatrixXd> llt(noise_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("noise covariance must be positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();
  return [F, G, chol](const Eigen::VectorXd& prev, RngStream& rng) -> Eigen::VectorXd {
    if (prev.size() != F.cols()) throw std::invalid_argument("state length does not match F");
    return F * prev + G * (chol * rng.normals(static_cast<int>(chol.cols())));
  };
}

}  // namespace mttbd
