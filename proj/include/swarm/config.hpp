#pragma once

// Scenario configuration: flat dotted keys (`uav.count: 7`), loaded from YAML
// and validated before a run starts.

#include "swarm/coverage.hpp"
#include "swarm/evtm.hpp"
#include "swarm/fusion.hpp"
#include "swarm/sensing.hpp"
#include "swarm/world.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace swarm {

struct ScenarioConfig {
  Area area;
  double cell = 20.0;

  int uav_count = 7;
  UavLimits uav;
  double altitude = 100.0;
  double fov = 2.0 * std::atan(2.5);  // rad
  double uav_v0 = 20.0;               // initial speed, m/s
  double uav_spacing = 50.0;          // launch lattice spacing, m
  double r_c = 400.0;

  int target_count = 4;
  TargetMotion target;

  SensorParams sensor;  // sensor.r_o == 0 means derive from altitude and fov
  CurveParams curve;
  int L = 31;
  double t0 = 0.0;

  int horizon = 3;
  int n_j = 2;
  FilterParams filter;
  bool exhaustive = false;

  CoverageParams coverage;  // coverage.d_c == 0 means 1.5 * r_c

  long steps = 1500;
  double dt = 1.0;
  std::uint64_t seed = 1;

  bool coverage_only = false;
  bool trace_messages = false;

  double r_o() const { return sensor.r_o > 0.0 ? sensor.r_o : sensing_radius(altitude, fov); }
  double d_c() const { return coverage.d_c > 0.0 ? coverage.d_c : 1.5 * r_c; }
  GridGeometry geometry() const;
  /// Sensor parameters with r_o resolved.
  SensorParams sensor_params() const;
  /// Coverage parameters with d_c resolved.
  CoverageParams coverage_params() const;
};

/// Every recognized key, in documentation order.
std::vector<std::string> config_keys();

/// Sets one key from its textual value. Throws ConfigError naming the key.
void set_key(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Textual value of a key (round-trips through set_key).
std::string get_key(const ScenarioConfig& cfg, const std::string& key);

/// Throws ConfigError on the first invalid key.
void validate(const ScenarioConfig& cfg);

/// Parses YAML text (nested maps are flattened to dotted keys) over the
/// defaults and validates the result.
ScenarioConfig parse_config(const std::string& yaml_text);

/// Reads a config file. A missing or unreadable file throws ConfigError with
/// an empty key.
ScenarioConfig load_config(const std::string& path);

/// Documented defaults, one `key: value  # doc` line per key.
std::string defaults_yaml();

}  // namespace swarm
