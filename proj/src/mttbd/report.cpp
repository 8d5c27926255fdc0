#include "mttbd/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "mttbd/csv.hpp"
#include "mttbd/errors.hpp"
#include "mttbd/estimate.hpp"
#include "mttbd/metrics.hpp"
#include "mttbd/parallel.hpp"

namespace mttbd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t sweep_trial_seed(std::uint64_t seed, int snr_index, int trial) {
  // Same chain as RngStream::derive(seed, {kStreamSweepTrial, snr_index, trial}).
  std::uint64_t k = mix64(seed);
  k = combine64(k, kStreamSweepTrial);
  k = combine64(k, static_cast<std::uint64_t>(snr_index));
  return combine64(k, static_cast<std::uint64_t>(trial));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!file) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open: " + path);
  return std::string((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
}

// Iterates lines, handing "# key=value" pairs to the header map and data
// lines to on_row. The first line must equal `version_line`.
void parse_csv_file(const std::string& path, const std::string& version_line,
                    std::map<std::string, std::string>& header,
                    const std::function<void(std::string_view, const std::string&)>& on_row) {
  const std::string text = read_file(path);
  bool version_seen = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line = csv::trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!version_seen) {
        if (line != version_line)
          throw IoError(where + ": expected '" + version_line + "'");
        version_seen = true;
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq != std::string_view::npos && line.find(':') == std::string_view::npos)
        header[std::string(csv::trim(line.substr(1, eq - 1)))] =
            std::string(csv::trim(line.substr(eq + 1)));
      continue;
    }
    if (!version_seen) throw IoError(where + ": missing '" + version_line + "' header");
    on_row(line, where);
  }
  if (!version_seen) throw IoError(path + ": empty file");
}

std::string need_header(const std::map<std::string, std::string>& header, const char* key,
                        const std::string& path) {
  const auto it = header.find(key);
  if (it == header.end()) throw IoError(path + ": missing header '" + std::string(key) + "'");
  return it->second;
}

}  // namespace

RunReport run_trial(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_trial(cfg, generate_truth(cfg.scenario()));
}

RunReport run_trial(const ExperimentConfig& cfg, const GroundTruth& truth) {
  cfg.validate();
  const Scenario scn = cfg.scenario();
  if (truth.n_z() != scn.network.n_z())
    throw std::invalid_argument("replay data has " + std::to_string(truth.n_z()) +
                                " links but the configured network has " +
                                std::to_string(scn.network.n_z()));
  if (truth.n_steps() < 1) throw std::invalid_argument("replay data has no steps");
  const FilterConfig fc = cfg.filter_config(scn, truth.sigma_v);
  const OspaParams ospa_params{cfg.ospa_cutoff, cfg.ospa_order};

  RunReport rep;
  rep.sigma_v = truth.sigma_v;
  rep.requested_snr_db = truth.requested_snr_db;
  rep.realized_snr_db = truth.realized_snr_db;
  rep.seed = cfg.seed;
  rep.config_hash = cfg.hash();
  rep.n_max = cfg.n_max;
  rep.n_truth = truth.n_targets();
  rep.steps.reserve(truth.n_steps());

  const auto t0 = std::chrono::steady_clock::now();
  ParticleSet set = initialize(fc);
  double ospa_sum = 0.0;
  for (int t = 1; t <= truth.n_steps(); ++t) {
    StepStats stats;
    set = step(set, truth.observation(t), fc, &stats);
    const MultiTargetEstimate est = estimate(set, cfg.activity_threshold);

    StepRecord rec;
    rec.t = t;
    rec.truth_count = truth.active_count(t);
    rec.estimated_count = est.present_count();
    rec.ess = stats.ess;
    rec.ospa = ospa(truth.active_positions(t), est.positions(), ospa_params);
    ospa_sum += rec.ospa;
    rec.activity_prob.resize(cfg.n_max);
    rec.present.resize(cfg.n_max);
    rec.mean.assign(cfg.n_max, Eigen::Vector4d::Constant(kNaN));
    for (int j = 0; j < cfg.n_max; ++j) {
      rec.activity_prob[j] = est.targets[j].activity_prob;
      rec.present[j] = est.targets[j].present ? 1 : 0;
      if (est.targets[j].present) rec.mean[j] = est.targets[j].state;
    }
    rec.truth_pos.assign(truth.n_targets(), Eigen::Vector2d::Constant(kNaN));
    for (int j = 0; j < truth.n_targets(); ++j)
      if (truth.active(t, j))
        rec.truth_pos[j] = Eigen::Vector2d(truth.states[t - 1][j](0), truth.states[t - 1][j](2));
    rep.steps.push_back(std::move(rec));
  }
  rep.time_avg_ospa = ospa_sum / truth.n_steps();
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SweepTable run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n_snr = static_cast<int>(cfg.snr_list.size());
  const int n_trials = cfg.n_trials;
  std::vector<double> avg_ospa(static_cast<std::size_t>(n_snr) * n_trials);
  std::vector<double> realized(static_cast<std::size_t>(n_snr) * n_trials);

  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(n_snr * n_trials, cfg.threads, [&](int idx) {
    const int s = idx / n_trials;
    const int i = idx % n_trials;
    ExperimentConfig trial_cfg = cfg;
    trial_cfg.snr_db = cfg.snr_list[s];
    trial_cfg.seed = sweep_trial_seed(cfg.seed, s, i);
    trial_cfg.threads = 1;  // concurrency lives at the trial level
    const RunReport rep = run_trial(trial_cfg);
    avg_ospa[idx] = rep.time_avg_ospa;
    realized[idx] = rep.realized_snr_db;
  });

  SweepTable table;
  table.seed = cfg.seed;
  table.config_hash = cfg.hash();
  for (int s = 0; s < n_snr; ++s) {
    SweepRow row;
    row.snr_db = cfg.snr_list[s];
    row.n_trials = n_trials;
    double sum = 0.0, rsum = 0.0;
    for (int i = 0; i < n_trials; ++i) {
      sum += avg_ospa[s * n_trials + i];
      rsum += realized[s * n_trials + i];
    }
    row.mean_ospa = sum / n_trials;
    row.mean_realized_snr_db = rsum / n_trials;
    double sq = 0.0;
    for (int i = 0; i < n_trials; ++i) {
      const double d = avg_ospa[s * n_trials + i] - row.mean_ospa;
      sq += d * d;
    }
    row.std_ospa = n_trials > 1 ? std::sqrt(sq / (n_trials - 1)) : 0.0;
    table.rows.push_back(row);
  }
  table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return table;
}

void save_report(const RunReport& report, const std::string& path) {
  std::string out;
  out.reserve(report.steps.size() * 64 * (report.n_max + report.n_truth) + 4096);
  out += "# mttbd-track v1\n";
  out += "# config_hash=" + csv::format_hex64(report.config_hash) + "\n";
  out += "# seed=" + csv::format_u64(report.seed) + "\n";
  out += "# n_steps=" + csv::format_u64(report.steps.size()) + "\n";
  out += "# n_max=" + csv::format_u64(report.n_max) + "\n";
  out += "# n_truth=" + csv::format_u64(report.n_truth) + "\n";
  out += "# sigma_v=" + csv::format_double(report.sigma_v) + "\n";
  out += "# requested_snr_db=" + csv::format_double(report.requested_snr_db) + "\n";
  out += "# realized_snr_db=" + csv::format_double(report.realized_snr_db) + "\n";
  out += "# time_avg_ospa=" + csv::format_double(report.time_avg_ospa) + "\n";
  out += "# units: positions m, velocities m/s, ospa m\n";
  out += "t,truth_count,estimated_count,ospa,ess";
  for (int j = 0; j < report.n_truth; ++j) {
    const std::string sj = std::to_string(j);
    out += ",truth_x_" + sj + ",truth_y_" + sj;
  }
  for (int j = 0; j < report.n_max; ++j) {
    const std::string sj = std::to_string(j);
    out += ",active_" + sj + ",prob_" + sj + ",x_" + sj + ",vx_" + sj + ",y_" + sj + ",vy_" + sj;
  }
  out += "\n";
  for (const StepRecord& rec : report.steps) {
    out += csv::format_u64(rec.t);
    out += "," + csv::format_u64(rec.truth_count);
    out += "," + csv::format_u64(rec.estimated_count);
    out += "," + csv::format_double(rec.ospa);
    out += "," + csv::format_double(rec.ess);
    for (int j = 0; j < report.n_truth; ++j)
      out += "," + csv::format_double(rec.truth_pos[j](0)) + "," +
             csv::format_double(rec.truth_pos[j](1));
    for (int j = 0; j < report.n_max; ++j) {
      out += rec.present[j] ? ",1" : ",0";
      out += "," + csv::format_double(rec.activity_prob[j]);
      for (int c = 0; c < 4; ++c) out += "," + csv::format_double(rec.mean[j](c));
    }
    out += "\n";
  }
  write_file(path, out);
}

RunReport load_report(const std::string& path) {
  RunReport rep;
  std::map<std::string, std::string> header;
  bool dims_ready = false;
  bool columns_seen = false;
  parse_csv_file(path, "# mttbd-track v1", header, [&](std::string_view line,
                                                       const std::string& where) {
    if (!dims_ready) {
      rep.config_hash = csv::parse_hex64(need_header(header, "config_hash", path), where);
      rep.seed = csv::parse_u64(need_header(header, "seed", path), where);
      rep.n_max = static_cast<int>(csv::parse_int(need_header(header, "n_max", path), where));
      rep.n_truth = static_cast<int>(csv::parse_int(need_header(header, "n_truth", path), where));
      rep.sigma_v = csv::parse_double(need_header(header, "sigma_v", path), where);
      rep.requested_snr_db =
          csv::parse_double(need_header(header, "requested_snr_db", path), where);
      rep.realized_snr_db =
          csv::parse_double(need_header(header, "realized_snr_db", path), where);
      rep.time_avg_ospa = csv::parse_double(need_header(header, "time_avg_ospa", path), where);
      if (rep.n_max < 1 || rep.n_truth < 0) throw IoError(path + ": bad dimensions in header");
      dims_ready = true;
    }
    if (!columns_seen) {
      if (line.substr(0, 2) != "t,") throw IoError(where + ": expected the column header row");
      columns_seen = true;
      return;
    }
    const auto f = csv::split(line, ',');
    const std::size_t expected = 5 + 2 * rep.n_truth + 6 * rep.n_max;
    if (f.size() != expected)
      throw IoError(where + ": expected " + std::to_string(expected) + " fields, got " +
                    std::to_string(f.size()));
    StepRecord rec;
    std::size_t i = 0;
    rec.t = static_cast<int>(csv::parse_int(f[i++], where));
    rec.truth_count = static_cast<int>(csv::parse_int(f[i++], where));
    rec.estimated_count = static_cast<int>(csv::parse_int(f[i++], where));
    rec.ospa = csv::parse_double(f[i++], where);
    rec.ess = csv::parse_double(f[i++], where);
    rec.truth_pos.resize(rep.n_truth);
    for (int j = 0; j < rep.n_truth; ++j) {
      rec.truth_pos[j](0) = csv::parse_double(f[i++], where);
      rec.truth_pos[j](1) = csv::parse_double(f[i++], where);
    }
    rec.present.resize(rep.n_max);
    rec.activity_prob.resize(rep.n_max);
    rec.mean.resize(rep.n_max);
    for (int j = 0; j < rep.n_max; ++j) {
      rec.present[j] = csv::parse_int(f[i++], where) ? 1 : 0;
      rec.activity_prob[j] = csv::parse_double(f[i++], where);
      for (int c = 0; c < 4; ++c) rec.mean[j](c) = csv::parse_double(f[i++], where);
    }
    rep.steps.push_back(std::move(rec));
  });
  if (!columns_seen) throw IoError(path + ": no data rows");
  return rep;
}

void save_sweep(const SweepTable& table, const std::string& path) {
  std::string out;
  out += "# mttbd-sweep v1\n";
  out += "# config_hash=" + csv::format_hex64(table.config_hash) + "\n";
  out += "# seed=" + csv::format_u64(table.seed) + "\n";
  out += "# units: ospa m, snr dB\n";
  out += "snr_db,n_trials,mean_ospa,std_ospa,mean_realized_snr_db\n";
  for (const SweepRow& row : table.rows) {
    out += csv::format_double(row.snr_db);
    out += "," + csv::format_u64(row.n_trials);
    out += "," + csv::format_double(row.mean_ospa);
    out += "," + csv::format_double(row.std_ospa);
    out += "," + csv::format_double(row.mean_realized_snr_db);
    out += "\n";
  }
  write_file(path, out);
}

SweepTable load_sweep(const std::string& path) {
  SweepTable table;
  std::map<std::string, std::string> header;
  bool dims_ready = false;
  bool columns_seen = false;
  parse_csv_file(path, "# mttbd-sweep v1", header,
                 [&](std::string_view line, const std::string& where) {
                   if (!dims_ready) {
                     table.config_hash =
                         csv::parse_hex64(need_header(header, "config_hash", path), where);
                     table.seed = csv::parse_u64(need_header(header, "seed", path), where);
                     dims_ready = true;
                   }
                   if (!columns_seen) {
                     if (line.substr(0, 7) != "snr_db,")
                       throw IoError(where + ": expected the column header row");
                     columns_seen = true;
                     return;
                   }
                   const auto f = csv::split(line, ',');
                   if (f.size() != 5) throw IoError(where + ": expected 5 fields");
                   SweepRow row;
                   row.snr_db = csv::parse_double(f[0], where);
                   row.n_trials = static_cast<int>(csv::parse_int(f[1], where));
                   row.mean_ospa = csv::parse_double(f[2], where);
                   row.std_ospa = csv::parse_double(f[3], where);
                   row.mean_realized_snr_db = csv::parse_double(f[4], where);
                   table.rows.push_back(row);
                 });
  if (!columns_seen) throw IoError(path + ": no data rows");
  return table;
}

}  // namespace mttbd
