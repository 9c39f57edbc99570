#include "swarm/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace swarm {

GridGeometry ScenarioConfig::geometry() const {
  GridGeometry g;
  g.cell = cell;
  g.cols = static_cast<int>(std::ceil(area.width / cell - 1e-9));
  g.rows = static_cast<int>(std::ceil(area.height / cell - 1e-9));
  return g;
}

SensorParams ScenarioConfig::sensor_params() const {
  SensorParams p = sensor;
  p.r_o = r_o();
  return p;
}

CoverageParams ScenarioConfig::coverage_params() const {
  CoverageParams p = coverage;
  p.d_c = d_c();
  return p;
}

namespace {

struct KeyDef {
  std::string key;
  std::string doc;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(key, fmt::format("expected true/false, got '{}'", text));
  } else {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ConfigError(key, fmt::format("cannot parse '{}'", text));
    return value;
  }
}

template <typename T>
std::string format_value(T value) {
  if constexpr (std::is_same_v<T, bool>) {
    return value ? "true" : "false";
  } else {
    return fmt::format("{}", value);
  }
}

template <typename T, typename Access>
KeyDef def(std::string key, std::string doc, Access access) {
  KeyDef d;
  d.key = key;
  d.doc = std::move(doc);
  d.set = [access, key](ScenarioConfig& c, const std::string& text) { access(c) = parse_value<T>(key, text); };
  d.get = [access](const ScenarioConfig& c) { return format_value<T>(access(const_cast<ScenarioConfig&>(c))); };
  return d;
}

#define SWARM_FIELD(T, key, member, doc) \
  def<T>(key, doc, [](ScenarioConfig& c) -> T& { return c.member; })

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      SWARM_FIELD(double, "area.width", area.width, "area extent along x, m"),
      SWARM_FIELD(double, "area.height", area.height, "area extent along y, m"),
      SWARM_FIELD(double, "area.cell", cell, "grid cell edge, m"),
      SWARM_FIELD(int, "uav.count", uav_count, "number of UAVs"),
      SWARM_FIELD(double, "uav.altitude", altitude, "flight altitude, m"),
      SWARM_FIELD(double, "uav.fov", fov, "camera field of view, rad"),
      SWARM_FIELD(double, "uav.v_min", uav.v_min, "minimum ground speed, m/s"),
      SWARM_FIELD(double, "uav.v_max", uav.v_max, "maximum ground speed, m/s"),
      SWARM_FIELD(double, "uav.dv_max", uav.dv_max, "acceleration bound, m/s^2"),
      SWARM_FIELD(double, "uav.omega_max", uav.omega_max, "turn-rate bound, rad/s"),
      SWARM_FIELD(double, "uav.v0", uav_v0, "initial speed, m/s"),
      SWARM_FIELD(double, "uav.spacing", uav_spacing, "launch lattice spacing around the area center, m"),
      SWARM_FIELD(double, "comm.r_c", r_c, "communication range, m"),
      SWARM_FIELD(int, "target.count", target_count, "number of ground targets"),
      SWARM_FIELD(double, "target.v_min", target.v_min, "minimum initial target speed, m/s"),
      SWARM_FIELD(double, "target.v_max", target.v_max, "maximum target speed, m/s"),
      SWARM_FIELD(double, "target.p_turn", target.p_turn, "per-step maneuver probability"),
      SWARM_FIELD(double, "target.theta_turn", target.theta_turn, "maximum maneuver rotation, rad"),
      SWARM_FIELD(double, "sensor.r_o", sensor.r_o, "sensing radius, m (0 = altitude * tan(fov / 2))"),
      SWARM_FIELD(double, "sensor.w_p1", sensor.w_p1, "detection curve scale"),
      SWARM_FIELD(double, "sensor.w_p2", sensor.w_p2, "detection curve distance divisor"),
      SWARM_FIELD(double, "sensor.w_p3", sensor.w_p3, "detection curve exponent"),
      SWARM_FIELD(double, "sensor.sigma_r", sensor.sigma_r, "range noise std, m"),
      SWARM_FIELD(double, "sensor.sigma_theta", sensor.sigma_theta, "bearing noise std, rad"),
      SWARM_FIELD(double, "curve.alpha", curve.alpha, "visiting requirement rate"),
      SWARM_FIELD(double, "curve.beta", curve.beta, "visiting requirement shape"),
      SWARM_FIELD(double, "curve.T_c", curve.T_c, "revisit time threshold, s"),
      SWARM_FIELD(int, "evtm.L", L, "exchanged local map width, cells (odd)"),
      SWARM_FIELD(double, "evtm.t0", t0, "initial map time, s"),
      SWARM_FIELD(int, "tracking.horizon", horizon, "planning horizon H, steps"),
      SWARM_FIELD(int, "tracking.n_j", n_j, "maximum trackers per target"),
      SWARM_FIELD(int, "tracking.k_lost", filter.k_lost, "steps without measurement before a track is dropped"),
      SWARM_FIELD(double, "tracking.q_a", filter.q_a, "target acceleration noise intensity, m^2/s^3"),
      SWARM_FIELD(double, "tracking.p0_pos", filter.p0_pos, "birth position variance, m^2"),
      SWARM_FIELD(double, "tracking.p0_vel", filter.p0_vel, "birth velocity variance, (m/s)^2"),
      SWARM_FIELD(bool, "tracking.exhaustive", exhaustive, "exhaustive horizon search instead of greedy"),
      SWARM_FIELD(double, "coverage.k_o", coverage.k_o, "collision avoidance gain"),
      SWARM_FIELD(double, "coverage.k_c", coverage.k_c, "decentering gain"),
      SWARM_FIELD(double, "coverage.k_a", coverage.k_a, "heading match sharpness"),
      SWARM_FIELD(double, "coverage.w_f", coverage.w_f, "local coverage reward weight"),
      SWARM_FIELD(double, "coverage.w_q", coverage.w_q, "global search reward weight"),
      SWARM_FIELD(double, "coverage.w_a", coverage.w_a, "heading match weight"),
      SWARM_FIELD(double, "coverage.d_c", coverage.d_c, "decentering threshold, m (0 = 1.5 * comm.r_c)"),
      SWARM_FIELD(double, "coverage.d_o", coverage.d_o, "safety distance, m"),
      SWARM_FIELD(long, "sim.steps", steps, "number of simulation steps"),
      SWARM_FIELD(double, "sim.dt", dt, "step length, s"),
      SWARM_FIELD(std::uint64_t, "sim.seed", seed, "random seed"),
      SWARM_FIELD(bool, "mission.coverage_only", coverage_only, "disable tracking; every UAV covers"),
      SWARM_FIELD(bool, "trace.messages", trace_messages, "log first-round fusion messages in events.jsonl"),
  };
  return table;
}

#undef SWARM_FIELD

const KeyDef& find_key(const std::string& key) {
  for (const KeyDef& d : key_table()) {
    if (d.key == key) return d;
  }
  throw ConfigError(key, "unknown key");
}

void flatten(const YAML::Node& node, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string k = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? k : prefix + "." + k, out);
    }
  } else if (node.IsScalar()) {
    out.emplace_back(prefix, node.Scalar());
  } else if (node.IsNull()) {
    if (!prefix.empty()) throw ConfigError(prefix, "missing value");
  } else {
    throw ConfigError(prefix, "expected a scalar value");
  }
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const KeyDef& d : key_table()) keys.push_back(d.key);
  return keys;
}

void set_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) { find_key(key).set(cfg, value); }

std::string get_key(const ScenarioConfig& cfg, const std::string& key) { return find_key(key).get(cfg); }

void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(c.area.width > 0.0, "area.width", "must be positive");
  require(c.area.height > 0.0, "area.height", "must be positive");
  require(c.cell > 0.0, "area.cell", "must be positive");
  require(c.uav_count >= 1, "uav.count", "must be at least 1");
  require(c.altitude > 0.0, "uav.altitude", "must be positive");
  require(c.fov > 0.0 && c.fov < kPi, "uav.fov", "must lie in (0, pi)");
  require(c.uav.v_min > 0.0, "uav.v_min", "must be positive");
  require(c.uav.v_max >= c.uav.v_min, "uav.v_max", "must be at least uav.v_min");
  require(c.uav.dv_max >= 0.0, "uav.dv_max", "must be non-negative");
  require(c.uav.omega_max > 0.0, "uav.omega_max", "must be positive");
  require(c.uav_spacing >= 0.0, "uav.spacing", "must be non-negative");
  require(c.r_c >= 0.0, "comm.r_c", "must be non-negative");
  require(c.target_count >= 0, "target.count", "must be non-negative");
  require(c.target.v_min >= 0.0, "target.v_min", "must be non-negative");
  require(c.target.v_max >= c.target.v_min, "target.v_max", "must be at least target.v_min");
  require(c.target.p_turn >= 0.0 && c.target.p_turn <= 1.0, "target.p_turn", "must lie in [0, 1]");
  require(c.sensor.r_o >= 0.0, "sensor.r_o", "must be non-negative");
  require(c.sensor.w_p1 > 0.0, "sensor.w_p1", "must be positive");
  require(c.sensor.w_p2 > 0.0, "sensor.w_p2", "must be positive");
  require(c.sensor.w_p3 > 0.0, "sensor.w_p3", "must be positive");
  require(c.sensor.sigma_r > 0.0, "sensor.sigma_r", "must be positive");
  require(c.sensor.sigma_theta > 0.0, "sensor.sigma_theta", "must be positive");
  require(c.curve.alpha > 0.0, "curve.alpha", "must be positive");
  require(c.curve.beta > 0.0, "curve.beta", "must be positive");
  require(c.curve.T_c > 0.0, "curve.T_c", "must be positive");
  require(c.L >= 1 && c.L % 2 == 1, "evtm.L", "must be odd and at least 1");
  require(c.horizon >= 1, "tracking.horizon", "must be at least 1");
  require(c.n_j >= 1, "tracking.n_j", "must be at least 1");
  require(c.filter.k_lost >= 1, "tracking.k_lost", "must be at least 1");
  require(c.filter.q_a >= 0.0, "tracking.q_a", "must be non-negative");
  require(c.filter.p0_pos > 0.0, "tracking.p0_pos", "must be positive");
  require(c.filter.p0_vel > 0.0, "tracking.p0_vel", "must be positive");
  require(c.coverage.d_c >= 0.0, "coverage.d_c", "must be non-negative");
  require(c.coverage.d_o > 0.0, "coverage.d_o", "must be positive");
  require(c.steps >= 0, "sim.steps", "must be non-negative");
  require(c.dt > 0.0, "sim.dt", "must be positive");
  require(c.r_o() > 0.0, "sensor.r_o", "resolved sensing radius must be positive");
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", fmt::format("malformed YAML: {}", e.what()));
  }
  ScenarioConfig cfg;
  std::vector<std::pair<std::string, std::string>> entries;
  if (!root.IsNull()) {
    if (!root.IsMap()) throw ConfigError("", "top level must be a mapping");
    flatten(root, "", entries);
  }
  for (const auto& [key, value] : entries) set_key(cfg, key, value);
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot read config file '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string defaults_yaml() {
  const ScenarioConfig cfg;
  std::string out;
  for (const KeyDef& d : key_table()) out += fmt::format("{}: {}  # {}\n", d.key, d.get(cfg), d.doc);
  return out;
}

}  // namespace swarm
