#pragma once

// Anti-flocking coverage decision: separation heading, heading-match map,
// coverage/search reward maps, overall coverage reward map (OCRM) and the
// waypoint command derived from its argmax.

#include "swarm/evtm.hpp"
#include "swarm/world.hpp"

#include <optional>
#include <span>

namespace swarm {

struct CoverageParams {
  double k_o = 1.0;    // collision-avoidance gain
  double k_c = 1.0;    // decentering gain
  double k_a = 2.0;    // heading-match sharpness
  double w_f = 1.0;    // local coverage reward weight
  double w_q = 0.5;    // global search reward weight
  double w_a = 0.3;    // heading-match weight
  double d_c = 600.0;  // decentering threshold, m
  double d_o = 100.0;  // safety distance, m
};

/// Compact-support linear repulsion max(0, (d0 - d) / d0).
double repulsive_potential(double d, double d0);

/// Weighted sum of unit repulsions from neighbors/obstacles and from the
/// neighbor centroid, normalized. None when the sum vanishes.
std::optional<Vec2> separation_heading(const UavState& self, std::span<const UavState> neighbors,
                                       std::span<const Vec2> obstacles, const CoverageParams& p);

/// Heading match for the 3x3 cells around the UAV's cell ([1 + dm][1 + dn]).
/// Cells needing a turn of at least omega_max * dt, or off the grid, get 0.
Map3 heading_match_map(const UavState& self, const std::optional<Vec2>& desired, const CoverageParams& p,
                       double omega_max, double dt, const GridGeometry& geometry);

struct RewardMaps {
  Map3 F{};  // predicted coverage reward per candidate cell
  Map3 Q{};  // global search reward
};

/// F: sum of visiting requirements over the sensing disk centered on each
/// candidate cell (off-grid cells contribute 0). Q = (t_now - T^g) / T_c.
RewardMaps reward_maps(const Evtm& evtm, const CompressedMap& compressed, const UavState& self, const CurveParams& p,
                       double t_now, double r_o);

struct Ocrm {
  Map3 j{};
  Cell anchor;
};

Ocrm ocrm(const Map3& F, const Map3& Q, const Map3& A, const CoverageParams& p, Cell anchor = {});

struct CoverageDecision {
  UavCommand command;
  Cell target;
};

/// Waypoint = in-grid argmax of J (row-major tie-break); command from the
/// speed needed to reach it in one step and the heading error, both saturated.
CoverageDecision coverage_command(const UavState& self, const Ocrm& j, double dt, const UavLimits& limits,
                                  const GridGeometry& geometry);

}  // namespace swarm
