#pragma once

// Disk field of view, probabilistic grid detection and noisy range-bearing
// measurements of targets.

#include "swarm/grid.hpp"
#include "swarm/world.hpp"

#include <optional>
#include <random>
#include <vector>

namespace swarm {

struct SensorParams {
  double w_p1 = 1.0;
  double w_p2 = 1.2;
  double w_p3 = 0.8;
  double r_o = 250.0;          // sensing disk radius, m
  double sigma_r = 5.0;        // range noise std, m
  double sigma_theta = 0.05;   // bearing noise std, rad
};

struct Measurement {
  int target_id = 0;
  double range = 0.0;    // m
  double bearing = 0.0;  // world frame, UAV -> target, rad in (-pi, pi]
  long stamp = 0;        // time step
};

/// Sensing radius of a nadir camera: h * tan(fov / 2).
double sensing_radius(double altitude, double fov);

/// Grid detection probability exp(-w_p1 * (d / r_o / w_p2)^w_p3).
/// Throws OutOfRange when dist > r_o.
double detection_probability(double dist, const SensorParams& params);

/// Cells whose centers lie within r_o of the UAV, in row-major order.
std::vector<Cell> visible_grids(const UavState& uav, const GridGeometry& geometry, double r_o);

/// Range-bearing measurement with independent Gaussian noise; none when the
/// target is outside the sensing disk.
std::optional<Measurement> measure(const UavState& uav, const TargetTruth& truth, std::mt19937_64& rng,
                                   const SensorParams& params, long stamp = 0);

}  // namespace swarm
