#include "mttbd/observation.hpp"

#include <cmath>
#include <stdexcept>

namespace mttbd {

template <class Scalar>
SignalVector<Scalar> superpose(const MultiTargetState& state, const SuperpositionalModel<Scalar>& model) {
  SignalVector<Scalar> sum = SignalVector<Scalar>::Zero(model.n_z);
  for (const TargetState& t : state.targets) {
    if (!t.active) continue;
    sum += model.signal_map(t.x);
  }
  return sum;
}

template <class Scalar>
SignalVector<Scalar> sample_observation(const MultiTargetState& state,
                                        const SuperpositionalModel<Scalar>& model, RngStream& rng) {
  if (!model.noise_sampler) throw std::invalid_argument("model has no noise sampler");
  return superpose(state, model) + model.noise_sampler(rng);
}

template RealSignal superpose(const MultiTargetState&, const SuperpositionalModel<double>&);
template ComplexSignal superpose(const MultiTargetState&, const SuperpositionalModel<std::complex<double>>&);
template RealSignal sample_observation(const MultiTargetState&, const SuperpositionalModel<double>&, RngStream&);
template ComplexSignal sample_observation(const MultiTargetState&, const SuperpositionalModel<std::complex<double>>&, RngStream&);

double gaussian_log_likelihood(const RealSignal& z, const RealSignal& s, double sigma_v) {
  if (z.size() != s.size()) throw std::invalid_argument("observation/signal length mismatch");
  if (!(sigma_v > 0.0)) throw std::invalid_argument("sigma_v must be positive");
  if (!z.isFinite().all() || !s.isFinite().all())
    throw std::invalid_argument("non-finite observation or signal");
  const double n = static_cast<double>(z.size());
  const double var = sigma_v * sigma_v;
  const double sq = (z - s).matrix().squaredNorm();
  return -0.5 * n * std::log(2.0 * M_PI * var) - sq / (2.0 * var);
}

double gaussian_log_likelihood(const ComplexSignal& z, const ComplexSignal& s, double sigma_v) {
  if (z.size() != s.size()) throw std::invalid_argument("observation/signal length mismatch");
  if (!(sigma_v > 0.0)) throw std::invalid_argument("sigma_v must be positive");
  if (!z.isFinite().all() || !s.isFinite().all())
    throw std::invalid_argument("non-finite observation or signal");
  const double n = static_cast<double>(z.size());
  const double var = sigma_v * sigma_v;
  const double sq = (z - s).matrix().squaredNorm();
  return -n * std::log(M_PI * var) - sq / var;
}

RealSignal rf_signal_map(const Eigen::VectorXd& state, const RfNetwork& net) {
  if (state.size() < 3) throw std::invalid_argument("state carries no planar position");
  const Eigen::Vector2d p(state[0], state[2]);
  const int n = net.n_z();
  RealSignal d(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = net.nodes[net.links[i].first];
    const Eigen::Vector2d& b = net.nodes[net.links[i].second];
    d[i] = (p - a).norm() + (p - b).norm() - (a - b).norm();
  }
  return net.amplitude * (-d / net.decay_scale).exp();
}

RealModel make_gaussian_model(int n_z, std::function<RealSignal(const Eigen::VectorXd&)> signal_map,
                              double sigma_v) {
  if (!(sigma_v > 0.0)) throw std::invalid_argument("sigma_v must be positive");
  RealModel m;
  m.n_z = n_z;
  m.signal_map = std::move(signal_map);
  m.log_likelihood = [sigma_v](const RealSignal& z, const RealSignal& s) {
    return gaussian_log_likelihood(z, s, sigma_v);
  };
  m.noise_sampler = [n_z, sigma_v](RngStream& rng) -> RealSignal {
    return sigma_v * rng.normals(n_z).array();
  };
  return m;
}

namespace {

// Flattened link geometry so one signal-map call costs n_a node distances,
// one gather, and one vectorized exp.
struct RfFastMap {
  Eigen::Matrix2Xd nodes;
  Eigen::ArrayXi tx, rx;
  Eigen::ArrayXd baseline;
  double amplitude = 0.0;
  double inv_decay = 0.0;

  RealSignal operator()(const Eigen::VectorXd& state) const {
    if (state.size() < 3) throw std::invalid_argument("state carries no planar position");
    const Eigen::Vector2d p(state[0], state[2]);
    const int na = static_cast<int>(nodes.cols());
    Eigen::ArrayXd node_dist(na);
    for (int i = 0; i < na; ++i) node_dist[i] = (p - nodes.col(i)).norm();
    const int n = static_cast<int>(tx.size());
    Eigen::ArrayXd d(n);
    for (int i = 0; i < n; ++i) d[i] = node_dist[tx[i]] + node_dist[rx[i]] - baseline[i];
    return amplitude * (-d * inv_decay).exp();
  }
};

}  // namespace

RealModel make_rf_model(const RfNetwork& net, double sigma_v) {
  const int n = net.n_z();
  RfFastMap fast;
  fast.nodes.resize(2, static_cast<int>(net.nodes.size()));
  for (int i = 0; i < static_cast<int>(net.nodes.size()); ++i) fast.nodes.col(i) = net.nodes[i];
  fast.tx.resize(n);
  fast.rx.resize(n);
  fast.baseline.resize(n);
  for (int i = 0; i < n; ++i) {
    fast.tx[i] = net.links[i].first;
    fast.rx[i] = net.links[i].second;
    fast.baseline[i] = (net.nodes[net.links[i].first] - net.nodes[net.links[i].second]).norm();
  }
  fast.amplitude = net.amplitude;
  fast.inv_decay = 1.0 / net.decay_scale;
  return make_gaussian_model(n, fast, sigma_v);
}

}  // namespace mttbd
