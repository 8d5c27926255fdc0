#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mttbd/rng.hpp"
#include "mttbd/state_model.hpp"

namespace mttbd {

// Sensor signals are vectors of n_z scalars; the scalar type is real for the
// RF scenario and may be complex<double> for models that need it.
template <class Scalar>
using SignalVector = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using RealSignal = SignalVector<double>;
using ComplexSignal = SignalVector<std::complex<double>>;
using Observation = RealSignal;

// The pair (h, p_o): per-target signal map and the log-density of an
// observation given the summed signal of all active targets. noise_sampler
// (p_v) is only needed when simulating observations.
template <class Scalar>
struct SuperpositionalModel {
  int n_z = 0;
  std::function<SignalVector<Scalar>(const Eigen::VectorXd&)> signal_map;
  std::function<double(const SignalVector<Scalar>&, const SignalVector<Scalar>&)> log_likelihood;
  std::function<SignalVector<Scalar>(RngStream&)> noise_sampler;
};

using RealModel = SuperpositionalModel<double>;

// Sum of signal_map over exactly the active targets; zero when none active.
template <class Scalar>
SignalVector<Scalar> superpose(const MultiTargetState& state, const SuperpositionalModel<Scalar>& model);

// superpose(state) plus one additive noise draw.
template <class Scalar>
SignalVector<Scalar> sample_observation(const MultiTargetState& state,
                                        const SuperpositionalModel<Scalar>& model, RngStream& rng);

// log N(z; s, sigma_v^2 I). Throws on non-finite inputs.
double gaussian_log_likelihood(const RealSignal& z, const RealSignal& s, double sigma_v);
// Circularly symmetric complex case: -n log(pi sigma^2) - |z - s|^2 / sigma^2.
double gaussian_log_likelihood(const ComplexSignal& z, const ComplexSignal& s, double sigma_v);

// RF tomography sensor network: n_a nodes in the plane, one link per
// unordered node pair, and link signal h_i = amplitude * exp(-d_i / decay)
// where d_i is the excess path length of the target relative to link i.
struct RfNetwork {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::pair<int, int>> links;
  double amplitude = 5.0;     // phi
  double decay_scale = 0.2;   // sigma_h [m]
  int n_z() const { return static_cast<int>(links.size()); }
};

// d_i = |p - tx_i| + |p - rx_i| - |tx_i - rx_i|, zero exactly on the link
// segment. The planar position is read from state components 0 and 2
// (layout x, vx, y, vy).
RealSignal rf_signal_map(const Eigen::VectorXd& state, const RfNetwork& net);

// Gaussian-noise superpositional model over an arbitrary signal map.
RealModel make_gaussian_model(int n_z,
                              std::function<RealSignal(const Eigen::VectorXd&)> signal_map,
                              double sigma_v);

// RF model with a precomputed fast path for the signal map.
RealModel make_rf_model(const RfNetwork& net, double sigma_v);

}  // namespace mttbd
