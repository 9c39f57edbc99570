#pragma once

// Ground-truth dynamics: fixed-wing UAV kinematics, ground target motion and
// the range-limited communication graph.

#include "swarm/common.hpp"

#include <random>
#include <utility>
#include <vector>

namespace swarm {

struct UavLimits {
  double v_min = 15.0;           // m/s
  double v_max = 40.0;           // m/s
  double dv_max = 5.0;           // m/s^2
  double omega_max = kPi / 6.0;  // rad/s
};

struct UavState {
  int id = 0;
  double x = 0.0;    // m
  double y = 0.0;    // m
  double v = 0.0;    // m/s
  double eta = 0.0;  // heading, rad in (-pi, pi]
  double h = 100.0;  // altitude, m

  Vec2 position() const { return {x, y}; }
};

struct UavCommand {
  double dv = 0.0;     // ground acceleration, m/s^2
  double omega = 0.0;  // heading rate, rad/s
};

struct TargetTruth {
  int id = 0;
  double x = 0.0;
  double xdot = 0.0;
  double y = 0.0;
  double ydot = 0.0;

  Vec2 position() const { return {x, y}; }
  double speed() const { return std::hypot(xdot, ydot); }
};

struct TargetMotion {
  double p_turn = 0.05;          // per-step maneuver probability
  double theta_turn = kPi / 4.0; // max |rotation| of a maneuver, rad
  double v_min = 3.0;            // m/s, initial speed range
  double v_max = 10.0;           // m/s, also the speed clamp
};

/// Rectangular area [0, width] x [0, height]. Targets bounce off its edges.
struct Area {
  double width = 2500.0;
  double height = 2500.0;
};

/// One step of the discrete fixed-wing model. Position uses the speed and
/// heading from before the update; speed is clamped to [v_min, v_max] after
/// the acceleration is applied; heading is wrapped, never clamped.
UavState step_uav(const UavState& state, const UavCommand& cmd, double dt, const UavLimits& limits);

/// Rotates the velocity vector of a target by `angle` radians.
TargetTruth rotate_velocity(const TargetTruth& truth, double angle);

/// Constant-velocity step followed by a Bernoulli(p_turn) maneuver that rotates
/// the velocity by U[-theta_turn, theta_turn]. Speed is clamped to motion.v_max.
/// When `area` is given the target reflects off its boundary.
TargetTruth step_target(const TargetTruth& truth, double dt, const TargetMotion& motion,
                        std::mt19937_64& rng, const Area* area = nullptr);

struct CommGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < q, sorted
  std::vector<std::vector<int>> adjacency; // sorted neighbor lists

  bool linked(int i, int q) const;
  const std::vector<int>& neighbors(int i) const { return adjacency[static_cast<std::size_t>(i)]; }
};

/// Builds a graph from an explicit edge list (used by tests and by the
/// fusion/assignment layers for sub-graphs).
CommGraph make_graph(int n, std::vector<std::pair<int, int>> edges);

/// Edge (i, q) iff the distance is strictly below r_c.
CommGraph comm_graph(const std::vector<Vec2>& positions, double r_c);

/// Connected components, each sorted ascending; components ordered by their
/// smallest member.
std::vector<std::vector<int>> connected_components(const CommGraph& g);

}  // namespace swarm
