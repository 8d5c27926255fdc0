/* Multi-target track-before-detect particle filtering over superpositional
 * sensors: C interface to the shared library.
 *
 * All functions return mttbd_status; outputs are written through pointers.
 * On failure the out-pointer is untouched and mttbd_last_error() returns a
 * message for the calling thread. Every object created by a *_create/_load/
 * _run function must be released with the matching *_free (safe on NULL).
 */
#ifndef MTTBD_H
#define MTTBD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mttbd_status {
  MTTBD_OK = 0,
  MTTBD_ERR_INVALID_ARGUMENT = 1,
  MTTBD_ERR_CONFIG = 2,     /* unparseable or invalid configuration */
  MTTBD_ERR_DEGENERATE = 3, /* every particle weight vanished */
  MTTBD_ERR_IO = 4,         /* file missing, unwritable, or malformed */
  MTTBD_ERR_INTERNAL = 5
} mttbd_status;

const char* mttbd_version(void);

/* Message for the most recent failing call on this thread ("" after success). */
const char* mttbd_last_error(void);

/* ---- configuration ------------------------------------------------------ */

typedef struct mttbd_config mttbd_config;

/* Reference experiment defaults. */
mttbd_status mttbd_config_create(mttbd_config** out);
/* Parse "key = value" text; `name` labels diagnostics (may be NULL). */
mttbd_status mttbd_config_parse(const char* text, const char* name, mttbd_config** out);
mttbd_status mttbd_config_load(const char* path, mttbd_config** out);
mttbd_status mttbd_config_set(mttbd_config* cfg, const char* key, const char* value);
/* Writes the value string (NUL-terminated) into buf; fails with
 * MTTBD_ERR_INVALID_ARGUMENT when buflen is too small. */
mttbd_status mttbd_config_get(const mttbd_config* cfg, const char* key, char* buf, size_t buflen);
mttbd_status mttbd_config_hash(const mttbd_config* cfg, uint64_t* out);
void mttbd_config_free(mttbd_config* cfg);

/* ---- ground truth ------------------------------------------------------- */

typedef struct mttbd_truth mttbd_truth;

mttbd_status mttbd_generate_truth(const mttbd_config* cfg, mttbd_truth** out);
mttbd_status mttbd_truth_save(const mttbd_truth* truth, const mttbd_config* cfg,
                              const char* path);
mttbd_status mttbd_truth_load(const char* path, mttbd_truth** out);
mttbd_status mttbd_truth_dims(const mttbd_truth* truth, int32_t* n_steps, int32_t* n_targets,
                              int32_t* n_z);
mttbd_status mttbd_truth_noise(const mttbd_truth* truth, double* sigma_v,
                               double* realized_snr_db);
/* Observation at step t (1-based) copied into z[n_z]. */
mttbd_status mttbd_truth_observation(const mttbd_truth* truth, int32_t t, double* z,
                                     size_t n_z);
void mttbd_truth_free(mttbd_truth* truth);

/* ---- single trials and sweeps ------------------------------------------- */

typedef struct mttbd_report mttbd_report;

mttbd_status mttbd_run_trial(const mttbd_config* cfg, mttbd_report** out);
/* Run the filter against existing data instead of generating fresh data. */
mttbd_status mttbd_run_replay(const mttbd_config* cfg, const mttbd_truth* truth,
                              mttbd_report** out);
mttbd_status mttbd_report_n_steps(const mttbd_report* rep, int32_t* out);
mttbd_status mttbd_report_time_avg_ospa(const mttbd_report* rep, double* out);
mttbd_status mttbd_report_realized_snr(const mttbd_report* rep, double* out);
mttbd_status mttbd_report_wall_seconds(const mttbd_report* rep, double* out);
/* Per-step results at t (1-based). Any out-pointer may be NULL. */
mttbd_status mttbd_report_step(const mttbd_report* rep, int32_t t, double* ospa,
                               int32_t* truth_count, int32_t* estimated_count);
mttbd_status mttbd_report_save(const mttbd_report* rep, const char* path);
void mttbd_report_free(mttbd_report* rep);

typedef struct mttbd_sweep mttbd_sweep;

mttbd_status mttbd_run_sweep(const mttbd_config* cfg, mttbd_sweep** out);
mttbd_status mttbd_sweep_n_rows(const mttbd_sweep* sweep, int32_t* out);
mttbd_status mttbd_sweep_row(const mttbd_sweep* sweep, int32_t index, double* snr_db,
                             double* mean_ospa, double* std_ospa);
mttbd_status mttbd_sweep_wall_seconds(const mttbd_sweep* sweep, double* out);
mttbd_status mttbd_sweep_save(const mttbd_sweep* sweep, const char* path);
void mttbd_sweep_free(mttbd_sweep* sweep);

/* ---- low-level filtering ------------------------------------------------ */

/* Step-by-step access for callers that bring their own observations. The
 * filter is built from the configuration's scenario (dynamics, birth model,
 * sensor network) at noise level sigma_v. */
typedef struct mttbd_filter mttbd_filter;

mttbd_status mttbd_filter_create(const mttbd_config* cfg, double sigma_v, mttbd_filter** out);
mttbd_status mttbd_filter_n_z(const mttbd_filter* f, int32_t* out);
/* Advance one step on observation z[n_z]; returns the effective sample size
 * through ess when non-NULL. */
mttbd_status mttbd_filter_step(mttbd_filter* f, const double* z, size_t n_z, double* ess);
/* Posterior summary per target model, written into caller arrays of length
 * n_max (any may be NULL): activity probability, presence flag, and the
 * conditional mean (x, vx, y, vy) packed row-wise into state[4 * n_max]. */
mttbd_status mttbd_filter_estimate(const mttbd_filter* f, double* activity_prob,
                                   int32_t* present, double* state, size_t n_max);
void mttbd_filter_free(mttbd_filter* f);

/* ---- utilities ----------------------------------------------------------- */

/* Set distance between planar point sets a[2 * n_a] and b[2 * n_b] (x, y
 * interleaved) with the given cutoff and order. */
mttbd_status mttbd_ospa(const double* a, int32_t n_a, const double* b, int32_t n_b,
                        double cutoff, double order, double* out);

/* Render a saved CSV (truth, track, or sweep) to an SVG figure. */
mttbd_status mttbd_plot(const char* csv_path, const char* svg_path);

#ifdef __cplusplus
}
#endif

#endif /* MTTBD_H */
