// Command-line front end for the tracking library. Talks to the core purely
// through the C interface in mttbd.h.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 runtime degeneracy
// (every particle weight vanished), 1 anything else.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mttbd.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

int exit_code_for(mttbd_status status) {
  switch (status) {
    case MTTBD_OK:
      return kExitOk;
    case MTTBD_ERR_CONFIG:
    case MTTBD_ERR_INVALID_ARGUMENT:
    case MTTBD_ERR_IO:
      return kExitConfig;
    case MTTBD_ERR_DEGENERATE:
      return kExitDegenerate;
    default:
      return kExitFailure;
  }
}

// Exits the process when a call fails, with the library's diagnostic.
void check(mttbd_status status, const char* what) {
  if (status == MTTBD_OK) return;
  std::fprintf(stderr, "error: %s: %s\n", what, mttbd_last_error());
  std::exit(exit_code_for(status));
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  // Overrides applied on top of the configuration file, stored as strings so
  // "unset" is distinguishable from any real value.
  std::string seed, snr, trials, particles, threads;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_trials) {
  cmd->add_option("--config", opt.config_path, "configuration file (key = value lines)");
  cmd->add_option("--out", opt.out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", opt.seed, "override the run seed");
  cmd->add_option("--snr", opt.snr, "override the SNR in dB");
  cmd->add_option("--particles", opt.particles, "override the particle count");
  cmd->add_option("--threads", opt.threads, "override the worker thread count (0 = all cores)");
  if (with_trials) cmd->add_option("--trials", opt.trials, "override the trials per sweep point");
}

mttbd_config* make_config(const CommonOptions& opt) {
  mttbd_config* cfg = nullptr;
  if (opt.config_path.empty())
    check(mttbd_config_create(&cfg), "default configuration");
  else
    check(mttbd_config_load(opt.config_path.c_str(), &cfg), opt.config_path.c_str());
  auto override_key = [&](const char* key, const std::string& value) {
    if (!value.empty()) check(mttbd_config_set(cfg, key, value.c_str()), key);
  };
  override_key("seed", opt.seed);
  override_key("snr_db", opt.snr);
  override_key("n_trials", opt.trials);
  override_key("n_particles", opt.particles);
  override_key("threads", opt.threads);
  return cfg;
}

std::string prepare_out_path(const std::string& dir, const char* filename) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output directory %s: %s\n", dir.c_str(),
                 ec.message().c_str());
    std::exit(kExitConfig);
  }
  return (std::filesystem::path(dir) / filename).string();
}

void print_config_stamp(const mttbd_config* cfg) {
  uint64_t hash = 0;
  char seed_buf[32] = "?";
  check(mttbd_config_hash(cfg, &hash), "config hash");
  mttbd_config_get(cfg, "seed", seed_buf, sizeof(seed_buf));
  std::fprintf(stderr, "config_hash=%016" PRIx64 " seed=%s\n", hash, seed_buf);
}

int cmd_generate(const CommonOptions& opt) {
  mttbd_config* cfg = make_config(opt);
  print_config_stamp(cfg);
  mttbd_truth* truth = nullptr;
  check(mttbd_generate_truth(cfg, &truth), "generate");
  int32_t n_steps = 0, n_targets = 0, n_z = 0;
  double sigma_v = 0, realized = 0;
  mttbd_truth_dims(truth, &n_steps, &n_targets, &n_z);
  mttbd_truth_noise(truth, &sigma_v, &realized);
  const std::string path = prepare_out_path(opt.out_dir, "truth.csv");
  check(mttbd_truth_save(truth, cfg, path.c_str()), path.c_str());
  std::fprintf(stderr, "wrote %s: %d steps, %d truth targets, %d links, sigma_v=%g, realized snr=%.2f dB\n",
               path.c_str(), n_steps, n_targets, n_z, sigma_v, realized);
  mttbd_truth_free(truth);
  mttbd_config_free(cfg);
  return kExitOk;
}

int cmd_track(const CommonOptions& opt, const std::string& replay_path) {
  mttbd_config* cfg = make_config(opt);
  print_config_stamp(cfg);
  mttbd_report* report = nullptr;
  if (replay_path.empty()) {
    check(mttbd_run_trial(cfg, &report), "track");
  } else {
    mttbd_truth* truth = nullptr;
    check(mttbd_truth_load(replay_path.c_str(), &truth), replay_path.c_str());
    check(mttbd_run_replay(cfg, truth, &report), "track (replay)");
    mttbd_truth_free(truth);
  }
  double avg = 0, realized = 0, wall = 0;
  int32_t n_steps = 0;
  mttbd_report_time_avg_ospa(report, &avg);
  mttbd_report_realized_snr(report, &realized);
  mttbd_report_wall_seconds(report, &wall);
  mttbd_report_n_steps(report, &n_steps);
  const std::string path = prepare_out_path(opt.out_dir, "track.csv");
  check(mttbd_report_save(report, path.c_str()), path.c_str());
  std::fprintf(stderr, "wrote %s: %d steps, time-averaged ospa=%.4f m, realized snr=%.2f dB, %.2f s\n",
               path.c_str(), n_steps, avg, realized, wall);
  mttbd_report_free(report);
  mttbd_config_free(cfg);
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opt) {
  mttbd_config* cfg = make_config(opt);
  print_config_stamp(cfg);
  mttbd_sweep* sweep = nullptr;
  check(mttbd_run_sweep(cfg, &sweep), "sweep");
  int32_t n_rows = 0;
  double wall = 0;
  mttbd_sweep_n_rows(sweep, &n_rows);
  mttbd_sweep_wall_seconds(sweep, &wall);
  const std::string path = prepare_out_path(opt.out_dir, "sweep.csv");
  check(mttbd_sweep_save(sweep, path.c_str()), path.c_str());
  std::fprintf(stderr, "wrote %s (%.2f s)\n", path.c_str(), wall);
  std::printf("%10s %14s %14s\n", "snr[dB]", "mean ospa[m]", "std ospa[m]");
  for (int32_t i = 0; i < n_rows; ++i) {
    double snr = 0, mean = 0, stddev = 0;
    check(mttbd_sweep_row(sweep, i, &snr, &mean, &stddev), "sweep row");
    std::printf("%10.2f %14.4f %14.4f\n", snr, mean, stddev);
  }
  mttbd_sweep_free(sweep);
  mttbd_config_free(cfg);
  return kExitOk;
}

int cmd_plot(const std::string& input, const std::string& out_dir) {
  const std::string stem = std::filesystem::path(input).stem().string();
  const std::string svg = prepare_out_path(out_dir, (stem + ".svg").c_str());
  check(mttbd_plot(input.c_str(), svg.c_str()), input.c_str());
  std::fprintf(stderr, "wrote %s\n", svg.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("multi-target track-before-detect simulator (library ") +
               mttbd_version() + ")"};
  app.require_subcommand(1);

  CommonOptions gen_opt, track_opt, sweep_opt;
  std::string replay_path, plot_input, plot_out = ".";

  CLI::App* generate = app.add_subcommand("generate", "simulate ground truth and observations");
  add_common_flags(generate, gen_opt, false);

  CLI::App* track = app.add_subcommand("track", "run one tracking trial");
  add_common_flags(track, track_opt, false);
  track->add_option("--replay", replay_path, "track a saved truth.csv instead of generating data");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep of tracking error over SNR");
  add_common_flags(sweep, sweep_opt, true);

  CLI::App* plot = app.add_subcommand("plot", "render a saved CSV (truth/track/sweep) to SVG");
  plot->add_option("input", plot_input, "CSV file to render")->required();
  plot->add_option("--out", plot_out, "output directory (created if missing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help; anything else is a usage error.
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (generate->parsed()) return cmd_generate(gen_opt);
  if (track->parsed()) return cmd_track(track_opt, replay_path);
  if (sweep->parsed()) return cmd_sweep(sweep_opt);
  if (plot->parsed()) return cmd_plot(plot_input, plot_out);
  return kExitConfig;
}
