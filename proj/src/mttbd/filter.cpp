#include "mttbd/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "mttbd/parallel.hpp"

namespace mttbd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum exp(v)) with the usual max shift; -inf when all entries are -inf.
double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

std::vector<double> ParticleSet::weights() const {
  std::vector<double> lw(particles.size());
  for (std::size_t k = 0; k < particles.size(); ++k) lw[k] = particles[k].log_weight;
  double m = kNegInf;
  for (double x : lw) m = std::max(m, x);
  std::vector<double> w(lw.size(), 0.0);
  if (!std::isfinite(m)) return w;  // all weights vanished
  double s = 0.0;
  for (std::size_t k = 0; k < lw.size(); ++k) {
    w[k] = std::exp(lw[k] - m);
    s += w[k];
  }
  for (double& x : w) x /= s;
  return w;
}

std::vector<int> residual_resample(std::span<const double> weights, int n_out, RngStream& rng) {
  const int m = static_cast<int>(weights.size());
  if (m == 0) throw std::invalid_argument("residual_resample: empty weight vector");
  if (n_out < 1) throw std::invalid_argument("residual_resample: n_out must be >= 1");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("residual_resample: negative or NaN weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("residual_resample: weights must sum to 1");

  std::vector<int> out;
  out.reserve(n_out);
  std::vector<double> resid(m);
  double resid_sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double scaled = static_cast<double>(n_out) * weights[k];
    const int copies = static_cast<int>(std::floor(scaled));
    for (int c = 0; c < copies; ++c) out.push_back(k);
    resid[k] = scaled - copies;
    resid_sum += resid[k];
  }
  // Draw the remaining slots from the residuals by inverse CDF.
  std::vector<double> cum(m);
  std::partial_sum(resid.begin(), resid.end(), cum.begin());
  while (static_cast<int>(out.size()) < n_out) {
    const double u = rng.uniform01() * resid_sum;
    int k = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (k >= m) k = m - 1;  // guard against u landing past the last cumsum by rounding
    out.push_back(k);
  }
  return out;
}

template <class Scalar>
ParticleSet initialize(const BasicFilterConfig<Scalar>& config) {
  config.validate();
  ParticleSet set;
  set.time_index = 0;
  set.particles.resize(config.n_particles);
  const double lw0 = -std::log(static_cast<double>(config.n_particles));
  parallel_for(config.n_particles, config.threads, [&](int k) {
    RngStream rng = RngStream::derive(config.seed, {kStreamInit, 0, static_cast<std::uint64_t>(k)});
    set.particles[k].state = sample_initial(config.n_max, config.initial, rng);
    set.particles[k].log_weight = lw0;
  });
  return set;
}

template <class Scalar>
ParticleSet step(const ParticleSet& prev, const SignalVector<Scalar>& z,
                 const BasicFilterConfig<Scalar>& config, StepStats* stats) {
  config.validate();
  const int n_p = prev.size();
  if (n_p != config.n_particles)
    throw std::invalid_argument("step: particle set size does not match config");
  if (z.size() != config.observation.n_z)
    throw std::invalid_argument("step: observation length does not match model");
  const int t = prev.time_index + 1;
  const std::uint64_t tu = static_cast<std::uint64_t>(t);

  // First stage: auxiliary draws s~_k from the transition kernel and weights
  // w~_k proportional to p_o(z | s~_k) w_{t-1}^k.
  std::vector<MultiTargetState> aux(n_p);
  std::vector<double> aux_loglik(n_p);
  std::vector<double> first_stage_log(n_p);
  parallel_for(n_p, config.threads, [&](int k) {
    RngStream rng =
        RngStream::derive(config.seed, {kStreamFirstStage, tu, static_cast<std::uint64_t>(k)});
    aux[k] = sample_joint_transition(prev.particles[k].state, config.transition, rng);
    aux_loglik[k] = config.observation.log_likelihood(z, superpose(aux[k], config.observation));
    first_stage_log[k] = aux_loglik[k] + prev.particles[k].log_weight;
  });

  const double log_first_sum = log_sum_exp(first_stage_log);
  if (!std::isfinite(log_first_sum))
    throw DegenerateLikelihoodError(
        t, "all first-stage weights vanished at step " + std::to_string(t));
  std::vector<double> first_stage(n_p);
  for (int k = 0; k < n_p; ++k) first_stage[k] = std::exp(first_stage_log[k] - log_first_sum);

  RngStream resample_rng = RngStream::derive(config.seed, {kStreamResample, tu});
  const std::vector<int> parents = residual_resample(first_stage, n_p, resample_rng);

  // Second stage: independent redraws from each parent's previous state,
  // weighted by the ratio of the new likelihood to the parent's auxiliary one.
  ParticleSet next;
  next.time_index = t;
  next.particles.resize(n_p);
  std::vector<double> ratio_log(n_p);
  parallel_for(n_p, config.threads, [&](int l) {
    const int parent = parents[l];
    RngStream rng =
        RngStream::derive(config.seed, {kStreamSecondStage, tu, static_cast<std::uint64_t>(l)});
    MultiTargetState drawn =
        sample_joint_transition(prev.particles[parent].state, config.transition, rng);
    const double loglik =
        config.observation.log_likelihood(z, superpose(drawn, config.observation));
    ratio_log[l] = loglik - aux_loglik[parent];
    next.particles[l].state = std::move(drawn);
  });

  const double log_ratio_sum = log_sum_exp(ratio_log);
  if (!std::isfinite(log_ratio_sum))
    throw DegenerateLikelihoodError(
        t, "all second-stage weights vanished at step " + std::to_string(t));
  double ess_denom = 0.0;
  for (int l = 0; l < n_p; ++l) {
    next.particles[l].log_weight = ratio_log[l] - log_ratio_sum;
    const double w = std::exp(next.particles[l].log_weight);
    ess_denom += w * w;
  }
  if (stats) {
    stats->ess = 1.0 / ess_denom;
    stats->log_first_stage_sum = log_first_sum;
    stats->log_ratio_mean = log_ratio_sum - std::log(static_cast<double>(n_p));
  }
  return next;
}

template ParticleSet initialize(const BasicFilterConfig<double>&);
template ParticleSet initialize(const BasicFilterConfig<std::complex<double>>&);
template ParticleSet step(const ParticleSet&, const SignalVector<double>&,
                          const BasicFilterConfig<double>&, StepStats*);
template ParticleSet step(const ParticleSet&, const SignalVector<std::complex<double>>&,
                          const BasicFilterConfig<std::complex<double>>&, StepStats*);

}  // namespace mttbd
