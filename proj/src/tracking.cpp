#include "swarm/tracking.hpp"

#include <limits>
#include <stdexcept>

namespace swarm {

namespace {
constexpr double kMinRange = 1.0;  // m
}

ActionSet ActionSet::make_default(const UavLimits& limits) {
  ActionSet set;
  for (double dv : {-limits.dv_max, 0.0, limits.dv_max}) {
    for (double k : {-1.0, -0.5, 0.0, 0.5, 1.0}) set.actions.push_back({dv, k * limits.omega_max});
  }
  return set;
}

Eigen::Matrix2d fim(const Vec2& uav_pos, const Vec2& target_pos, const SensorParams& params) {
  const Vec2 d = target_pos - uav_pos;
  const double r2 = d.squaredNorm();
  if (r2 < 1e-18) throw NumericalFailure("FIM undefined for coincident UAV and target");
  const double r = std::sqrt(r2);
  Eigen::Matrix2d H;
  H << d.x() / r, d.y() / r, -d.y() / r2, d.x() / r2;
  const Eigen::Vector2d r_inv(1.0 / (params.sigma_r * params.sigma_r),
                              1.0 / (params.sigma_theta * params.sigma_theta));
  return H.transpose() * r_inv.asDiagonal() * H;
}

double fim_determinant(double range, const SensorParams& params) {
  const double r = std::max(range, kMinRange);
  const double sr2 = params.sigma_r * params.sigma_r;
  const double st2 = params.sigma_theta * params.sigma_theta;
  return 1.0 / (sr2 * st2 * r * r);
}

double step_information(const Vec2& uav_pos, const Vec2& target_pos, const SensorParams& params) {
  const double range = (target_pos - uav_pos).norm();
  return range <= params.r_o ? fim_determinant(range, params) : 0.0;
}

Vec2 predict_target(const StateVec& s, double horizon_time) {
  return {s(0) + s(1) * horizon_time, s(2) + s(3) * horizon_time};
}

double horizon_reward(const UavState& uav, const TrackEntry& entry, std::span<const UavCommand> plan, double dt,
                      const UavLimits& limits, const SensorParams& sensor) {
  double reward = 0.0;
  UavState state = uav;
  for (std::size_t l = 0; l < plan.size(); ++l) {
    state = step_uav(state, plan[l], dt, limits);
    reward += step_information(state.position(), predict_target(entry.s_bar, static_cast<double>(l + 1) * dt), sensor);
  }
  return reward;
}

namespace {

HorizonPlan plan_greedy(const UavState& uav, const TrackEntry& entry, const ActionSet& actions, int H, double dt,
                        const UavLimits& limits, const SensorParams& sensor) {
  // Position lags the command by one step, so each candidate is scored where
  // it first takes effect: apply it, then hold for one step.
  const UavCommand hold{};
  HorizonPlan plan;
  UavState state = uav;
  for (int l = 0; l < H; ++l) {
    const Vec2 target = predict_target(entry.s_bar, static_cast<double>(l + 2) * dt);
    std::size_t best = 0;
    double best_info = -1.0;
    double best_range = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const UavState after = step_uav(step_uav(state, actions.actions[a], dt, limits), hold, dt, limits);
      const double range = (target - after.position()).norm();
      const double info = range <= sensor.r_o ? fim_determinant(range, sensor) : 0.0;
      const bool better = info > best_info || (info == 0.0 && best_info == 0.0 && range < best_range);
      if (better) {
        best = a;
        best_info = info;
        best_range = range;
      }
    }
    plan.actions.push_back(actions.actions[best]);
    state = step_uav(state, actions.actions[best], dt, limits);
  }
  plan.reward = horizon_reward(uav, entry, plan.actions, dt, limits, sensor);
  return plan;
}

HorizonPlan plan_exhaustive(const UavState& uav, const TrackEntry& entry, const ActionSet& actions, int H, double dt,
                            const UavLimits& limits, const SensorParams& sensor) {
  const std::size_t k = actions.size();
  std::size_t total = 1;
  for (int l = 0; l < H; ++l) total *= k;

  HorizonPlan best;
  best.reward = -1.0;
  std::vector<UavCommand> seq(static_cast<std::size_t>(H));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    // Most significant digit = first action, so enumeration is lexicographic.
    for (int l = H - 1; l >= 0; --l) {
      seq[static_cast<std::size_t>(l)] = actions.actions[c % k];
      c /= k;
    }
    const double r = horizon_reward(uav, entry, seq, dt, limits, sensor);
    if (r > best.reward) {
      best.reward = r;
      best.actions = seq;
    }
  }
  return best;
}

}  // namespace

HorizonPlan plan_tracking(const UavState& uav, const TrackEntry& entry, const ActionSet& actions, int H, double dt,
                          const UavLimits& limits, const SensorParams& sensor, PlanMode mode) {
  if (H < 1) throw std::invalid_argument("planning horizon must be at least 1");
  if (actions.size() == 0) throw std::invalid_argument("empty action set");
  return mode == PlanMode::Greedy ? plan_greedy(uav, entry, actions, H, dt, limits, sensor)
                                  : plan_exhaustive(uav, entry, actions, H, dt, limits, sensor);
}

}  // namespace swarm
