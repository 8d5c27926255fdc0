#include "mttbd/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mttbd/csv.hpp"

namespace mttbd {

namespace {

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, std::string_view, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

double parse_double_field(std::string_view v, const std::string& where) {
  try {
    return csv::parse_double(v, where);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

int parse_int_field(std::string_view v, const std::string& where) {
  try {
    return static_cast<int>(csv::parse_int(v, where));
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

std::uint64_t parse_u64_field(std::string_view v, const std::string& where) {
  try {
    return csv::parse_u64(v, where);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

bool parse_bool_field(std::string_view v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(where + ": not a boolean: '" + std::string(v) + "'");
}

std::vector<int> parse_int_list(std::string_view v, const std::string& where) {
  std::vector<int> out;
  if (csv::trim(v).empty()) return out;
  for (std::string_view part : csv::split(v, ','))
    out.push_back(parse_int_field(csv::trim(part), where));
  return out;
}

std::vector<double> parse_double_list(std::string_view v, const std::string& where) {
  std::vector<double> out;
  if (csv::trim(v).empty()) return out;
  for (std::string_view part : csv::split(v, ','))
    out.push_back(parse_double_field(csv::trim(part), where));
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += csv::format_double(v[i]);
  }
  return out;
}

#define DOUBLE_FIELD(name)                                                            \
  Field {                                                                             \
    #name, [](ExperimentConfig& c, std::string_view v,                                \
              const std::string& w) { c.name = parse_double_field(v, w); },           \
        [](const ExperimentConfig& c) { return csv::format_double(c.name); }          \
  }
#define INT_FIELD(name)                                                               \
  Field {                                                                             \
    #name, [](ExperimentConfig& c, std::string_view v,                                \
              const std::string& w) { c.name = parse_int_field(v, w); },              \
        [](const ExperimentConfig& c) { return std::to_string(c.name); }              \
  }

// Canonical field order: canonical_text() emits exactly these keys in this
// order, so the configuration hash is stable across formatting differences.
const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      DOUBLE_FIELD(region_min_x),
      DOUBLE_FIELD(region_max_x),
      DOUBLE_FIELD(region_min_y),
      DOUBLE_FIELD(region_max_y),
      INT_FIELD(n_nodes),
      DOUBLE_FIELD(signal_amplitude),
      DOUBLE_FIELD(signal_decay),
      DOUBLE_FIELD(sampling_period),
      DOUBLE_FIELD(process_noise),
      DOUBLE_FIELD(birth_prob),
      DOUBLE_FIELD(death_prob),
      INT_FIELD(n_steps),
      Field{"birth_steps",
            [](ExperimentConfig& c, std::string_view v, const std::string& w) {
              c.birth_steps = parse_int_list(v, w);
            },
            [](const ExperimentConfig& c) { return join_ints(c.birth_steps); }},
      Field{"death_steps",
            [](ExperimentConfig& c, std::string_view v, const std::string& w) {
              c.death_steps = parse_int_list(v, w);
            },
            [](const ExperimentConfig& c) { return join_ints(c.death_steps); }},
      DOUBLE_FIELD(snr_db),
      Field{"seed",
            [](ExperimentConfig& c, std::string_view v, const std::string& w) {
              c.seed = parse_u64_field(v, w);
            },
            [](const ExperimentConfig& c) { return csv::format_u64(c.seed); }},
      INT_FIELD(n_particles),
      INT_FIELD(n_max),
      INT_FIELD(threads),
      DOUBLE_FIELD(ospa_cutoff),
      DOUBLE_FIELD(ospa_order),
      DOUBLE_FIELD(activity_threshold),
      Field{"reflect_boundary",
            [](ExperimentConfig& c, std::string_view v, const std::string& w) {
              c.reflect_boundary = parse_bool_field(v, w);
            },
            [](const ExperimentConfig& c) {
              return std::string(c.reflect_boundary ? "true" : "false");
            }},
      Field{"snr_list",
            [](ExperimentConfig& c, std::string_view v, const std::string& w) {
              c.snr_list = parse_double_list(v, w);
            },
            [](const ExperimentConfig& c) { return join_doubles(c.snr_list); }},
      INT_FIELD(n_trials),
  };
  return table;
}

#undef DOUBLE_FIELD
#undef INT_FIELD

const Field* find_field(const std::string& key) {
  for (const Field& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown configuration key '" + key + "'");
  f->set(*this, csv::trim(value), "key '" + key + "'");
}

std::string ExperimentConfig::get(const std::string& key) const {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown configuration key '" + key + "'");
  return f->get(*this);
}

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.emplace_back(f.key);
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line = std::string_view(text).substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    const std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string_view::npos) line = line.substr(0, hash_pos);
    line = csv::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + ": expected 'key = value'");
    const std::string key(csv::trim(line.substr(0, eq)));
    const std::string value(csv::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    const Field* f = find_field(key);
    if (!f) throw ConfigError(where + ": unknown configuration key '" + key + "'");
    f->set(cfg, value, where);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  return parse(text, path);
}

std::string ExperimentConfig::canonical_text() const {
  std::string out;
  for (const Field& f : fields()) {
    // The thread count changes how work is scheduled, never the results, so
    // it is not part of the experiment's identity (results and emitted files
    // are byte-identical across thread counts, hash included).
    if (std::string_view(f.key) == "threads") continue;
    out += f.key;
    out += "=";
    out += f.get(*this);
    out += "\n";
  }
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical_text()); }

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  try {
    scenario();  // region, network, dynamics, schedule checks
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (n_particles < 1) fail("n_particles must be >= 1");
  if (n_max < 1) fail("n_max must be >= 1");
  if (threads < 0) fail("threads must be >= 0");
  if (!(activity_threshold >= 0.0 && activity_threshold <= 1.0))
    fail("activity_threshold must lie in [0, 1]");
  try {
    OspaParams{ospa_cutoff, ospa_order}.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (snr_list.empty()) fail("snr_list must not be empty");
  for (double s : snr_list)
    if (!std::isfinite(s)) fail("snr_list entries must be finite");
  if (n_trials < 1) fail("n_trials must be >= 1");
}

Scenario ExperimentConfig::scenario() const {
  Scenario scn;
  scn.region = Region{region_min_x, region_max_x, region_min_y, region_max_y};
  scn.region.validate();
  scn.network = build_network(scn.region, n_nodes, signal_amplitude, signal_decay);
  scn.dynamics = make_cv_dynamics(sampling_period, process_noise);
  scn.birth_death = BirthDeathMatrix{birth_prob, death_prob};
  if (!scn.birth_death.valid())
    throw std::invalid_argument("birth/death probabilities must lie in [0, 1]");
  scn.schedule = ActivitySchedule::from_events(n_steps, birth_steps, death_steps);
  scn.n_steps = n_steps;
  scn.snr_db = snr_db;
  scn.seed = seed;
  scn.reflect_boundary = reflect_boundary;
  scn.validate();
  return scn;
}

FilterConfig ExperimentConfig::filter_config(const Scenario& scn, double sigma_v) const {
  FilterConfig fc;
  fc.n_particles = n_particles;
  fc.n_max = n_max;
  fc.transition = make_scenario_transition(scn);
  fc.initial = make_scenario_initial(scn);
  fc.observation = make_rf_model(scn.network, sigma_v);
  fc.seed = seed;
  fc.threads = threads;
  return fc;
}

}  // namespace mttbd
