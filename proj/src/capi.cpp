#include "mttbd.h"

#include <cstring>
#include <string>

#include "mttbd/config.hpp"
#include "mttbd/errors.hpp"
#include "mttbd/estimate.hpp"
#include "mttbd/filter.hpp"
#include "mttbd/metrics.hpp"
#include "mttbd/report.hpp"
#include "mttbd/sim.hpp"
#include "mttbd/svg.hpp"

namespace {

thread_local std::string g_last_error;

// Runs fn, translating exceptions into status codes and storing the message
// for mttbd_last_error().
template <class Fn>
mttbd_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MTTBD_OK;
  } catch (const mttbd::ConfigError& e) {
    g_last_error = e.what();
    return MTTBD_ERR_CONFIG;
  } catch (const mttbd::IoError& e) {
    g_last_error = e.what();
    return MTTBD_ERR_IO;
  } catch (const mttbd::DegenerateLikelihoodError& e) {
    g_last_error = e.what();
    return MTTBD_ERR_DEGENERATE;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return MTTBD_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MTTBD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MTTBD_ERR_INTERNAL;
  }
}

mttbd_status invalid(const char* msg) {
  g_last_error = msg;
  return MTTBD_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct mttbd_config {
  mttbd::ExperimentConfig cfg;
};

struct mttbd_truth {
  mttbd::GroundTruth truth;
};

struct mttbd_report {
  mttbd::RunReport report;
};

struct mttbd_sweep {
  mttbd::SweepTable table;
};

struct mttbd_filter {
  mttbd::FilterConfig config;
  mttbd::ParticleSet particles;
  double activity_threshold = 0.5;
  double last_ess = 0.0;
};

extern "C" {

const char* mttbd_version(void) { return MTTBD_VERSION_STRING; }

const char* mttbd_last_error(void) { return g_last_error.c_str(); }

mttbd_status mttbd_config_create(mttbd_config** out) {
  if (!out) return invalid("out must not be NULL");
  return guarded([&] { *out = new mttbd_config{}; });
}

mttbd_status mttbd_config_parse(const char* text, const char* name, mttbd_config** out) {
  if (!text || !out) return invalid("text and out must not be NULL");
  return guarded([&] {
    *out = new mttbd_config{
        mttbd::ExperimentConfig::parse(text, name ? name : "<config>")};
  });
}

mttbd_status mttbd_config_load(const char* path, mttbd_config** out) {
  if (!path || !out) return invalid("path and out must not be NULL");
  return guarded([&] { *out = new mttbd_config{mttbd::ExperimentConfig::load(path)}; });
}

mttbd_status mttbd_config_set(mttbd_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("cfg, key, and value must not be NULL");
  return guarded([&] { cfg->cfg.set(key, value); });
}

mttbd_status mttbd_config_get(const mttbd_config* cfg, const char* key, char* buf,
                              size_t buflen) {
  if (!cfg || !key || !buf) return invalid("cfg, key, and buf must not be NULL");
  return guarded([&] {
    const std::string value = cfg->cfg.get(key);
    if (value.size() + 1 > buflen)
      throw std::invalid_argument("buffer too small for value of '" + std::string(key) + "'");
    std::memcpy(buf, value.c_str(), value.size() + 1);
  });
}

mttbd_status mttbd_config_hash(const mttbd_config* cfg, uint64_t* out) {
  if (!cfg || !out) return invalid("cfg and out must not be NULL");
  return guarded([&] { *out = cfg->cfg.hash(); });
}

void mttbd_config_free(mttbd_config* cfg) { delete cfg; }

mttbd_status mttbd_generate_truth(const mttbd_config* cfg, mttbd_truth** out) {
  if (!cfg || !out) return invalid("cfg and out must not be NULL");
  return guarded([&] {
    cfg->cfg.validate();
    *out = new mttbd_truth{mttbd::generate_truth(cfg->cfg.scenario())};
  });
}

mttbd_status mttbd_truth_save(const mttbd_truth* truth, const mttbd_config* cfg,
                              const char* path) {
  if (!truth || !cfg || !path) return invalid("truth, cfg, and path must not be NULL");
  return guarded(
      [&] { mttbd::save_truth(truth->truth, path, cfg->cfg.hash(), cfg->cfg.seed); });
}

mttbd_status mttbd_truth_load(const char* path, mttbd_truth** out) {
  if (!path || !out) return invalid("path and out must not be NULL");
  return guarded([&] { *out = new mttbd_truth{mttbd::load_truth(path).truth}; });
}

mttbd_status mttbd_truth_dims(const mttbd_truth* truth, int32_t* n_steps, int32_t* n_targets,
                              int32_t* n_z) {
  if (!truth) return invalid("truth must not be NULL");
  if (n_steps) *n_steps = truth->truth.n_steps();
  if (n_targets) *n_targets = truth->truth.n_targets();
  if (n_z) *n_z = truth->truth.n_z();
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_truth_noise(const mttbd_truth* truth, double* sigma_v,
                               double* realized_snr_db) {
  if (!truth) return invalid("truth must not be NULL");
  if (sigma_v) *sigma_v = truth->truth.sigma_v;
  if (realized_snr_db) *realized_snr_db = truth->truth.realized_snr_db;
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_truth_observation(const mttbd_truth* truth, int32_t t, double* z,
                                     size_t n_z) {
  if (!truth || !z) return invalid("truth and z must not be NULL");
  return guarded([&] {
    if (t < 1 || t > truth->truth.n_steps())
      throw std::invalid_argument("step index out of range");
    const mttbd::Observation& obs = truth->truth.observation(t);
    if (static_cast<size_t>(obs.size()) != n_z)
      throw std::invalid_argument("n_z does not match the stored observation length");
    std::memcpy(z, obs.data(), n_z * sizeof(double));
  });
}

void mttbd_truth_free(mttbd_truth* truth) { delete truth; }

mttbd_status mttbd_run_trial(const mttbd_config* cfg, mttbd_report** out) {
  if (!cfg || !out) return invalid("cfg and out must not be NULL");
  return guarded([&] { *out = new mttbd_report{mttbd::run_trial(cfg->cfg)}; });
}

mttbd_status mttbd_run_replay(const mttbd_config* cfg, const mttbd_truth* truth,
                              mttbd_report** out) {
  if (!cfg || !truth || !out) return invalid("cfg, truth, and out must not be NULL");
  return guarded([&] { *out = new mttbd_report{mttbd::run_trial(cfg->cfg, truth->truth)}; });
}

mttbd_status mttbd_report_n_steps(const mttbd_report* rep, int32_t* out) {
  if (!rep || !out) return invalid("rep and out must not be NULL");
  *out = static_cast<int32_t>(rep->report.steps.size());
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_report_time_avg_ospa(const mttbd_report* rep, double* out) {
  if (!rep || !out) return invalid("rep and out must not be NULL");
  *out = rep->report.time_avg_ospa;
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_report_realized_snr(const mttbd_report* rep, double* out) {
  if (!rep || !out) return invalid("rep and out must not be NULL");
  *out = rep->report.realized_snr_db;
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_report_wall_seconds(const mttbd_report* rep, double* out) {
  if (!rep || !out) return invalid("rep and out must not be NULL");
  *out = rep->report.wall_seconds;
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_report_step(const mttbd_report* rep, int32_t t, double* ospa,
                               int32_t* truth_count, int32_t* estimated_count) {
  if (!rep) return invalid("rep must not be NULL");
  return guarded([&] {
    if (t < 1 || static_cast<size_t>(t) > rep->report.steps.size())
      throw std::invalid_argument("step index out of range");
    const mttbd::StepRecord& rec = rep->report.steps[t - 1];
    if (ospa) *ospa = rec.ospa;
    if (truth_count) *truth_count = rec.truth_count;
    if (estimated_count) *estimated_count = rec.estimated_count;
  });
}

mttbd_status mttbd_report_save(const mttbd_report* rep, const char* path) {
  if (!rep || !path) return invalid("rep and path must not be NULL");
  return guarded([&] { mttbd::save_report(rep->report, path); });
}

void mttbd_report_free(mttbd_report* rep) { delete rep; }

mttbd_status mttbd_run_sweep(const mttbd_config* cfg, mttbd_sweep** out) {
  if (!cfg || !out) return invalid("cfg and out must not be NULL");
  return guarded([&] { *out = new mttbd_sweep{mttbd::run_sweep(cfg->cfg)}; });
}

mttbd_status mttbd_sweep_n_rows(const mttbd_sweep* sweep, int32_t* out) {
  if (!sweep || !out) return invalid("sweep and out must not be NULL");
  *out = static_cast<int32_t>(sweep->table.rows.size());
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_sweep_row(const mttbd_sweep* sweep, int32_t index, double* snr_db,
                             double* mean_ospa, double* std_ospa) {
  if (!sweep) return invalid("sweep must not be NULL");
  return guarded([&] {
    if (index < 0 || static_cast<size_t>(index) >= sweep->table.rows.size())
      throw std::invalid_argument("row index out of range");
    const mttbd::SweepRow& row = sweep->table.rows[index];
    if (snr_db) *snr_db = row.snr_db;
    if (mean_ospa) *mean_ospa = row.mean_ospa;
    if (std_ospa) *std_ospa = row.std_ospa;
  });
}

mttbd_status mttbd_sweep_wall_seconds(const mttbd_sweep* sweep, double* out) {
  if (!sweep || !out) return invalid("sweep and out must not be NULL");
  *out = sweep->table.wall_seconds;
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_sweep_save(const mttbd_sweep* sweep, const char* path) {
  if (!sweep || !path) return invalid("sweep and path must not be NULL");
  return guarded([&] { mttbd::save_sweep(sweep->table, path); });
}

void mttbd_sweep_free(mttbd_sweep* sweep) { delete sweep; }

mttbd_status mttbd_filter_create(const mttbd_config* cfg, double sigma_v, mttbd_filter** out) {
  if (!cfg || !out) return invalid("cfg and out must not be NULL");
  return guarded([&] {
    cfg->cfg.validate();
    if (!(sigma_v > 0.0)) throw std::invalid_argument("sigma_v must be positive");
    auto* f = new mttbd_filter{};
    try {
      f->config = cfg->cfg.filter_config(cfg->cfg.scenario(), sigma_v);
      f->activity_threshold = cfg->cfg.activity_threshold;
      f->particles = mttbd::initialize(f->config);
    } catch (...) {
      delete f;
      throw;
    }
    *out = f;
  });
}

mttbd_status mttbd_filter_n_z(const mttbd_filter* f, int32_t* out) {
  if (!f || !out) return invalid("filter and out must not be NULL");
  *out = f->config.observation.n_z;
  g_last_error.clear();
  return MTTBD_OK;
}

mttbd_status mttbd_filter_step(mttbd_filter* f, const double* z, size_t n_z, double* ess) {
  if (!f || !z) return invalid("filter and z must not be NULL");
  return guarded([&] {
    if (static_cast<int>(n_z) != f->config.observation.n_z)
      throw std::invalid_argument("observation length does not match the network");
    mttbd::Observation obs = Eigen::Map<const Eigen::ArrayXd>(z, static_cast<Eigen::Index>(n_z));
    mttbd::StepStats stats;
    f->particles = mttbd::step(f->particles, obs, f->config, &stats);
    f->last_ess = stats.ess;
    if (ess) *ess = stats.ess;
  });
}

mttbd_status mttbd_filter_estimate(const mttbd_filter* f, double* activity_prob,
                                   int32_t* present, double* state, size_t n_max) {
  if (!f) return invalid("filter must not be NULL");
  return guarded([&] {
    if (static_cast<int>(n_max) != f->config.n_max)
      throw std::invalid_argument("n_max does not match the filter");
    const mttbd::MultiTargetEstimate est = mttbd::estimate(f->particles, f->activity_threshold);
    for (size_t j = 0; j < n_max; ++j) {
      if (activity_prob) activity_prob[j] = est.targets[j].activity_prob;
      if (present) present[j] = est.targets[j].present ? 1 : 0;
      if (state) {
        for (int c = 0; c < 4; ++c)
          state[4 * j + c] = est.targets[j].present ? est.targets[j].state(c) : 0.0;
      }
    }
  });
}

void mttbd_filter_free(mttbd_filter* f) { delete f; }

mttbd_status mttbd_ospa(const double* a, int32_t n_a, const double* b, int32_t n_b,
                        double cutoff, double order, double* out) {
  if ((!a && n_a > 0) || (!b && n_b > 0) || !out)
    return invalid("point arrays must not be NULL (unless empty) and out must not be NULL");
  if (n_a < 0 || n_b < 0) return invalid("point counts must be non-negative");
  return guarded([&] {
    mttbd::PointSet sa(n_a), sb(n_b);
    for (int32_t i = 0; i < n_a; ++i) sa[i] = Eigen::Vector2d(a[2 * i], a[2 * i + 1]);
    for (int32_t i = 0; i < n_b; ++i) sb[i] = Eigen::Vector2d(b[2 * i], b[2 * i + 1]);
    *out = mttbd::ospa(sa, sb, mttbd::OspaParams{cutoff, order});
  });
}

mttbd_status mttbd_plot(const char* csv_path, const char* svg_path) {
  if (!csv_path || !svg_path) return invalid("csv_path and svg_path must not be NULL");
  return guarded([&] { mttbd::render_plot(csv_path, svg_path); });
}

}  // extern "C"
