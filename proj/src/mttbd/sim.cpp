#include "mttbd/sim.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "mttbd/csv.hpp"
#include "mttbd/errors.hpp"

namespace mttbd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Birth density p_b: position uniform over the region, velocity components
// standard normal. Draw order (x, vx, y, vy) is part of the reproducibility
// contract.
StateSampler make_birth_sampler(const Region& region) {
  return [region](RngStream& rng) -> Eigen::VectorXd {
    Eigen::VectorXd x(4);
    x(0) = rng.uniform(region.x_min, region.x_max);
    x(1) = rng.normal();
    x(2) = rng.uniform(region.y_min, region.y_max);
    x(3) = rng.normal();
    return x;
  };
}

double signal_power(const RealSignal& s) { return (s * s).sum(); }

}  // namespace

void Region::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min))
    throw std::invalid_argument("region must have positive width and height");
}

void Dynamics::validate() const {
  if (!(sampling_period > 0.0)) throw std::invalid_argument("sampling period must be positive");
  if (!F.allFinite() || !G.allFinite() || !process_noise_cov.allFinite())
    throw std::invalid_argument("dynamics matrices must be finite");
}

Dynamics make_cv_dynamics(double sampling_period, double process_noise) {
  if (!(sampling_period > 0.0)) throw std::invalid_argument("sampling period must be positive");
  if (!(process_noise >= 0.0)) throw std::invalid_argument("process noise must be non-negative");
  const double T = sampling_period;
  Dynamics dyn;
  dyn.sampling_period = T;
  dyn.F << 1, T, 0, 0,
           0, 1, 0, 0,
           0, 0, 1, T,
           0, 0, 0, 1;
  dyn.G << T * T / 2, 0,
           T,         0,
           0,         T * T / 2,
           0,         T;
  dyn.process_noise_cov = process_noise * Eigen::Matrix2d::Identity();
  return dyn;
}

int ActivitySchedule::active_count(int t) const {
  int n = 0;
  for (char a : rows[t - 1]) n += a ? 1 : 0;
  return n;
}

bool ActivitySchedule::all_inactive() const {
  for (const auto& row : rows)
    for (char a : row)
      if (a) return false;
  return true;
}

void ActivitySchedule::validate() const {
  const int n_t = n_targets();
  for (const auto& row : rows)
    if (static_cast<int>(row.size()) != n_t)
      throw std::invalid_argument("activity schedule rows must have equal length");
}

ActivitySchedule ActivitySchedule::from_events(int n_steps, const std::vector<int>& birth_steps,
                                               const std::vector<int>& death_steps) {
  if (n_steps < 1) throw std::invalid_argument("schedule needs at least one step");
  if (death_steps.size() > birth_steps.size())
    throw std::invalid_argument("more deaths than births in schedule");
  const int n_t = static_cast<int>(birth_steps.size());
  ActivitySchedule out;
  out.rows.assign(n_steps, std::vector<char>(n_t, 0));
  for (int j = 0; j < n_t; ++j) {
    const int birth = birth_steps[j];
    const int death = j < static_cast<int>(death_steps.size()) ? death_steps[j] : n_steps + 1;
    if (birth < 1 || birth > n_steps)
      throw std::invalid_argument("birth step " + std::to_string(birth) + " outside 1.." +
                                  std::to_string(n_steps));
    if (death <= birth)
      throw std::invalid_argument("death step " + std::to_string(death) +
                                  " does not follow its birth at " + std::to_string(birth));
    for (int t = birth; t < death && t <= n_steps; ++t) out.rows[t - 1][j] = 1;
  }
  return out;
}

void Scenario::validate() const {
  region.validate();
  dynamics.validate();
  schedule.validate();
  if (!birth_death.valid())
    throw std::invalid_argument("birth/death probabilities must lie in [0, 1]");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (schedule.n_steps() != n_steps)
    throw std::invalid_argument("schedule covers " + std::to_string(schedule.n_steps()) +
                                " steps but scenario has " + std::to_string(n_steps));
  if (network.n_z() < 1) throw std::invalid_argument("network has no links");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
}

int GroundTruth::active_count(int t) const {
  int n = 0;
  for (char a : activity[t - 1]) n += a ? 1 : 0;
  return n;
}

PointSet GroundTruth::active_positions(int t) const {
  PointSet out;
  for (int j = 0; j < n_targets(); ++j)
    if (active(t, j)) out.emplace_back(states[t - 1][j](0), states[t - 1][j](2));
  return out;
}

RfNetwork build_network(const Region& region, int n_a, double amplitude, double decay_scale) {
  region.validate();
  if (n_a < 2) throw std::invalid_argument("build_network: need at least 2 nodes");
  if (!(amplitude > 0.0) || !(decay_scale > 0.0))
    throw std::invalid_argument("build_network: amplitude and decay scale must be positive");
  RfNetwork net;
  net.amplitude = amplitude;
  net.decay_scale = decay_scale;
  const double w = region.width();
  const double h = region.height();
  const double spacing = region.perimeter() / n_a;
  net.nodes.reserve(n_a);
  for (int i = 0; i < n_a; ++i) {
    // Walk the perimeter counterclockwise from the lower-left corner:
    // bottom, right, top, left edge in that order.
    const double s = spacing * i;
    if (s < w)
      net.nodes.emplace_back(region.x_min + s, region.y_min);
    else if (s < w + h)
      net.nodes.emplace_back(region.x_max, region.y_min + (s - w));
    else if (s < 2 * w + h)
      net.nodes.emplace_back(region.x_max - (s - w - h), region.y_max);
    else
      net.nodes.emplace_back(region.x_min, region.y_max - (s - 2 * w - h));
  }
  net.links.reserve(static_cast<std::size_t>(n_a) * (n_a - 1) / 2);
  for (int i = 0; i < n_a; ++i)
    for (int j = i + 1; j < n_a; ++j) net.links.emplace_back(i, j);
  return net;
}

double calibrate_noise(const std::vector<RealSignal>& signals, double snr_db) {
  if (signals.empty()) throw std::invalid_argument("calibrate_noise: no signals");
  const Eigen::Index n_z = signals.front().size();
  double sum = 0.0;
  int count = 0;
  for (const auto& s : signals) {
    if (s.size() != n_z) throw std::invalid_argument("calibrate_noise: inconsistent lengths");
    const double p = signal_power(s);
    if (p > 0.0) {
      sum += p;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("calibrate_noise: every signal is zero");
  const double mean_power = sum / count;
  return std::sqrt(mean_power / (static_cast<double>(n_z) * std::pow(10.0, snr_db / 10.0)));
}

double realized_snr(const std::vector<RealSignal>& signals, const std::vector<RealSignal>& noise) {
  if (signals.size() != noise.size())
    throw std::invalid_argument("realized_snr: length mismatch");
  double sig = 0.0, nse = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const double p = signal_power(signals[i]);
    if (p > 0.0) {
      sig += p;
      nse += signal_power(noise[i]);
      ++count;
    }
  }
  if (count == 0) return kNaN;
  return 10.0 * std::log10(sig / count) - 10.0 * std::log10(nse / count);
}

void reflect_into(const Region& region, Eigen::Vector4d& state) {
  auto fold = [](double& pos, double& vel, double lo, double hi) {
    while (pos < lo || pos > hi) {
      pos = pos < lo ? 2.0 * lo - pos : 2.0 * hi - pos;
      vel = -vel;
    }
  };
  fold(state(0), state(1), region.x_min, region.x_max);
  fold(state(2), state(3), region.y_min, region.y_max);
}

GroundTruth generate_truth(const Scenario& scn) {
  scn.validate();
  const int n_steps = scn.n_steps;
  const int n_tgt = scn.schedule.n_targets();
  const int n_z = scn.network.n_z();

  GroundTruth out;
  out.requested_snr_db = scn.snr_db;
  out.states.assign(n_steps, std::vector<Eigen::Vector4d>(n_tgt, Eigen::Vector4d::Constant(kNaN)));
  out.activity.assign(n_steps, std::vector<char>(n_tgt, 0));

  const StateSampler birth = make_birth_sampler(scn.region);
  const ConditionalStateSampler survive = make_linear_gaussian_survival(
      scn.dynamics.F, scn.dynamics.G, scn.dynamics.process_noise_cov);

  // Each truth target owns one stream for its whole life, so its trajectory
  // does not depend on the other targets' schedules.
  std::vector<RealSignal> clean(n_steps, RealSignal::Zero(n_z));
  for (int j = 0; j < n_tgt; ++j) {
    RngStream rng = RngStream::derive(scn.seed, {kStreamTruthState, static_cast<std::uint64_t>(j)});
    Eigen::Vector4d x = Eigen::Vector4d::Zero();
    bool alive = false;
    for (int t = 1; t <= n_steps; ++t) {
      const bool a = scn.schedule.active(t, j);
      if (a) {
        if (!alive) {
          x = birth(rng);
        } else {
          x = survive(x, rng);
          if (scn.reflect_boundary) reflect_into(scn.region, x);
        }
        out.states[t - 1][j] = x;
        out.activity[t - 1][j] = 1;
        clean[t - 1] += rf_signal_map(x, scn.network);
      }
      alive = a;
    }
  }

  // An all-inactive schedule leaves nothing to calibrate against; fall back
  // to unit noise so the observations are well-defined pure noise.
  out.sigma_v = scn.schedule.all_inactive() ? 1.0 : calibrate_noise(clean, scn.snr_db);

  std::vector<RealSignal> noise(n_steps);
  out.observations.resize(n_steps);
  for (int t = 1; t <= n_steps; ++t) {
    RngStream rng = RngStream::derive(scn.seed, {kStreamTruthNoise, static_cast<std::uint64_t>(t)});
    noise[t - 1] = out.sigma_v * rng.normals(n_z).array();
    out.observations[t - 1] = clean[t - 1] + noise[t - 1];
  }
  out.realized_snr_db = realized_snr(clean, noise);
  return out;
}

TransitionModel make_scenario_transition(const Scenario& scn) {
  TransitionModel model;
  model.birth_death = scn.birth_death;
  model.survival = make_linear_gaussian_survival(scn.dynamics.F, scn.dynamics.G,
                                                 scn.dynamics.process_noise_cov);
  model.birth = make_birth_sampler(scn.region);
  return model;
}

InitialDistribution make_scenario_initial(const Scenario& scn) {
  InitialDistribution init;
  init.state = make_birth_sampler(scn.region);
  init.activity_prob = 0.0;  // every target model starts inactive
  return init;
}

void save_truth(const GroundTruth& truth, const std::string& path, std::uint64_t config_hash,
                std::uint64_t seed) {
  std::string out;
  out.reserve(static_cast<std::size_t>(truth.n_steps()) * (truth.n_z() + 4) * 20 + 4096);
  out += "# mttbd-truth v1\n";
  out += "# config_hash=" + csv::format_hex64(config_hash) + "\n";
  out += "# seed=" + csv::format_u64(seed) + "\n";
  out += "# n_steps=" + csv::format_u64(truth.n_steps()) + "\n";
  out += "# n_targets=" + csv::format_u64(truth.n_targets()) + "\n";
  out += "# n_z=" + csv::format_u64(truth.n_z()) + "\n";
  out += "# sigma_v=" + csv::format_double(truth.sigma_v) + "\n";
  out += "# requested_snr_db=" + csv::format_double(truth.requested_snr_db) + "\n";
  out += "# realized_snr_db=" + csv::format_double(truth.realized_snr_db) + "\n";
  out += "# state rows: state,t,target,x[m],vx[m/s],y[m],vy[m/s] (active targets only)\n";
  out += "# obs rows: obs,t,z_1..z_n_z\n";
  for (int t = 1; t <= truth.n_steps(); ++t) {
    for (int j = 0; j < truth.n_targets(); ++j) {
      if (!truth.active(t, j)) continue;
      const Eigen::Vector4d& x = truth.states[t - 1][j];
      out += "state," + csv::format_u64(t) + "," + csv::format_u64(j);
      for (int c = 0; c < 4; ++c) out += "," + csv::format_double(x(c));
      out += "\n";
    }
    out += "obs," + csv::format_u64(t);
    const Observation& z = truth.observation(t);
    for (Eigen::Index i = 0; i < z.size(); ++i) out += "," + csv::format_double(z(i));
    out += "\n";
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path);
}

LoadedTruth load_truth(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  std::map<std::string, std::string> header;
  LoadedTruth out;
  GroundTruth& truth = out.truth;
  int n_steps = -1, n_targets = -1, n_z = -1;
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
        if (line != "# mttbd-truth v1")
          throw IoError(where + ": not a truth file (expected '# mttbd-truth v1')");
        version_seen = true;
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq != std::string_view::npos && line.find(':') == std::string_view::npos) {
        const std::string key(csv::trim(line.substr(1, eq - 1)));
        header[key] = std::string(csv::trim(line.substr(eq + 1)));
      }
      continue;
    }
    if (!version_seen) throw IoError(where + ": missing '# mttbd-truth v1' header");
    if (n_steps < 0) {
      auto need = [&](const char* key) {
        auto it = header.find(key);
        if (it == header.end())
          throw IoError(path + ": missing header '" + key + "'");
        return it->second;
      };
      n_steps = static_cast<int>(csv::parse_int(need("n_steps"), where));
      n_targets = static_cast<int>(csv::parse_int(need("n_targets"), where));
      n_z = static_cast<int>(csv::parse_int(need("n_z"), where));
      if (n_steps < 1 || n_targets < 0 || n_z < 1)
        throw IoError(path + ": bad dimensions in header");
      truth.sigma_v = csv::parse_double(need("sigma_v"), where);
      truth.requested_snr_db = csv::parse_double(need("requested_snr_db"), where);
      truth.realized_snr_db = csv::parse_double(need("realized_snr_db"), where);
      out.config_hash = csv::parse_hex64(need("config_hash"), where);
      out.seed = csv::parse_u64(need("seed"), where);
      truth.states.assign(n_steps,
                          std::vector<Eigen::Vector4d>(n_targets, Eigen::Vector4d::Constant(kNaN)));
      truth.activity.assign(n_steps, std::vector<char>(n_targets, 0));
      truth.observations.assign(n_steps, Observation());
    }
    const auto fields = csv::split(line, ',');
    if (fields[0] == "state") {
      if (fields.size() != 7) throw IoError(where + ": state row needs 7 fields");
      const int t = static_cast<int>(csv::parse_int(fields[1], where));
      const int j = static_cast<int>(csv::parse_int(fields[2], where));
      if (t < 1 || t > n_steps || j < 0 || j >= n_targets)
        throw IoError(where + ": state row index out of range");
      for (int c = 0; c < 4; ++c)
        truth.states[t - 1][j](c) = csv::parse_double(fields[3 + c], where);
      truth.activity[t - 1][j] = 1;
    } else if (fields[0] == "obs") {
      if (static_cast<int>(fields.size()) != n_z + 2)
        throw IoError(where + ": obs row needs " + std::to_string(n_z + 2) + " fields");
      const int t = static_cast<int>(csv::parse_int(fields[1], where));
      if (t < 1 || t > n_steps) throw IoError(where + ": obs row step out of range");
      Observation z(n_z);
      for (int i = 0; i < n_z; ++i) z(i) = csv::parse_double(fields[2 + i], where);
      truth.observations[t - 1] = std::move(z);
    } else {
      throw IoError(where + ": unknown record '" + std::string(fields[0]) + "'");
    }
  }
  if (n_steps < 0) throw IoError(path + ": no data rows");
  for (int t = 1; t <= n_steps; ++t)
    if (truth.observations[t - 1].size() != n_z)
      throw IoError(path + ": missing obs row for step " + std::to_string(t));
  return out;
}

}  // namespace mttbd
