#include "swarm/sensing.hpp"

#include <fmt/format.h>

namespace swarm {

double sensing_radius(double altitude, double fov) { return altitude * std::tan(0.5 * fov); }

double detection_probability(double dist, const SensorParams& params) {
  if (dist > params.r_o) {
    throw OutOfRange(fmt::format("distance {} exceeds sensing radius {}", dist, params.r_o));
  }
  const double normalized = dist / params.r_o;
  return std::exp(-params.w_p1 * std::pow(normalized / params.w_p2, params.w_p3));
}

std::vector<Cell> visible_grids(const UavState& uav, const GridGeometry& geometry, double r_o) {
  std::vector<Cell> cells;
  const double r2 = r_o * r_o;
  const auto lo_m = static_cast<int>(std::floor((uav.y - r_o - geometry.origin.y()) / geometry.cell));
  const auto hi_m = static_cast<int>(std::floor((uav.y + r_o - geometry.origin.y()) / geometry.cell));
  const auto lo_n = static_cast<int>(std::floor((uav.x - r_o - geometry.origin.x()) / geometry.cell));
  const auto hi_n = static_cast<int>(std::floor((uav.x + r_o - geometry.origin.x()) / geometry.cell));
  for (int m = std::max(lo_m, 0); m <= std::min(hi_m, geometry.rows - 1); ++m) {
    for (int n = std::max(lo_n, 0); n <= std::min(hi_n, geometry.cols - 1); ++n) {
      const Vec2 c = geometry.center(m, n);
      const double dx = c.x() - uav.x;
      const double dy = c.y() - uav.y;
      if (dx * dx + dy * dy <= r2) cells.push_back({m, n});
    }
  }
  return cells;
}

std::optional<Measurement> measure(const UavState& uav, const TargetTruth& truth, std::mt19937_64& rng,
                                   const SensorParams& params, long stamp) {
  const double dx = truth.x - uav.x;
  const double dy = truth.y - uav.y;
  const double range = std::hypot(dx, dy);
  if (range > params.r_o) return std::nullopt;

  std::normal_distribution<double> noise(0.0, 1.0);
  Measurement z;
  z.target_id = truth.id;
  z.range = std::max(0.0, range + params.sigma_r * noise(rng));
  z.bearing = wrap_angle(std::atan2(dy, dx) + params.sigma_theta * noise(rng));
  z.stamp = stamp;
  return z;
}

}  // namespace swarm
