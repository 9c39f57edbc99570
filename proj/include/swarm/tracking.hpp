#pragma once

// Fisher-information tracking rewards and receding-horizon action planning.

#include "swarm/fusion.hpp"
#include "swarm/sensing.hpp"
#include "swarm/world.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace swarm {

struct ActionSet {
  std::vector<UavCommand> actions;

  std::size_t size() const { return actions.size(); }

  /// {-dv_max, 0, +dv_max} x {-w, -w/2, 0, +w/2, +w}, acceleration-major order.
  static ActionSet make_default(const UavLimits& limits);
};

struct HorizonPlan {
  std::vector<UavCommand> actions;
  double reward = 0.0;
};

enum class PlanMode { Greedy, Exhaustive };

/// Position-block Fisher information of one range-bearing measurement of a
/// target at `target_pos` taken from `uav_pos`. Throws NumericalFailure when
/// the positions coincide.
Eigen::Matrix2d fim(const Vec2& uav_pos, const Vec2& target_pos, const SensorParams& params);

/// Closed form det(G) = 1 / (sigma_r^2 sigma_theta^2 r^2), with r floored at
/// 1 m so coincident geometry yields a capped maximum.
double fim_determinant(double range, const SensorParams& params);

/// Reward density for one predicted step: det(G) when the target lies inside
/// the sensing disk, else 0.
double step_information(const Vec2& uav_pos, const Vec2& target_pos, const SensorParams& params);

/// Target position `horizon_time` seconds ahead under a noiseless CV model.
Vec2 predict_target(const StateVec& s, double horizon_time);

/// Sum over l = 1..H of the step information after executing plan[0..l-1],
/// with the target predicted from the fused estimate s_bar.
double horizon_reward(const UavState& uav, const TrackEntry& entry, std::span<const UavCommand> plan, double dt,
                      const UavLimits& limits, const SensorParams& sensor);

/// Greedy: at each depth every action is scored by the information at the
/// first step its effect reaches the position (the action, then one step of
/// zero command); when every candidate scores zero the one closing range to
/// the predicted target wins; remaining ties go to the lowest action index.
/// The returned reward is horizon_reward of the chosen sequence.
/// Exhaustive: argmax over all |actions|^H sequences (lexicographic tie-break).
HorizonPlan plan_tracking(const UavState& uav, const TrackEntry& entry, const ActionSet& actions, int H, double dt,
                          const UavLimits& limits, const SensorParams& sensor, PlanMode mode = PlanMode::Greedy);

}  // namespace swarm
