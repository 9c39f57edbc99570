#include "swarm/world.hpp"

#include <algorithm>
#include <numeric>

namespace swarm {

UavState step_uav(const UavState& state, const UavCommand& cmd, double dt, const UavLimits& limits) {
  UavState next = state;
  next.x = state.x + state.v * dt * std::cos(state.eta);
  next.y = state.y + state.v * dt * std::sin(state.eta);
  next.v = std::clamp(state.v + cmd.dv * dt, limits.v_min, limits.v_max);
  next.eta = wrap_angle(state.eta + cmd.omega * dt);
  return next;
}

TargetTruth rotate_velocity(const TargetTruth& truth, double angle) {
  TargetTruth out = truth;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  out.xdot = c * truth.xdot - s * truth.ydot;
  out.ydot = s * truth.xdot + c * truth.ydot;
  return out;
}

namespace {

void reflect(double& pos, double& vel, double lo, double hi) {
  if (hi <= lo) return;
  // A single fold is enough while |vel| * dt is smaller than the area.
  if (pos < lo) {
    pos = lo + (lo - pos);
    vel = std::abs(vel);
  } else if (pos > hi) {
    pos = hi - (pos - hi);
    vel = -std::abs(vel);
  }
  pos = std::clamp(pos, lo, hi);
}

}  // namespace

TargetTruth step_target(const TargetTruth& truth, double dt, const TargetMotion& motion,
                        std::mt19937_64& rng, const Area* area) {
  TargetTruth next = truth;
  next.x += truth.xdot * dt;
  next.y += truth.ydot * dt;
  if (area != nullptr) {
    reflect(next.x, next.xdot, 0.0, area->width);
    reflect(next.y, next.ydot, 0.0, area->height);
  }

  std::bernoulli_distribution turn(motion.p_turn);
  if (turn(rng)) {
    std::uniform_real_distribution<double> angle(-motion.theta_turn, motion.theta_turn);
    next = rotate_velocity(next, angle(rng));
  }

  const double speed = next.speed();
  if (speed > motion.v_max && speed > 0.0) {
    const double k = motion.v_max / speed;
    next.xdot *= k;
    next.ydot *= k;
  }
  return next;
}

bool CommGraph::linked(int i, int q) const {
  const auto& nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), q);
}

CommGraph make_graph(int n, std::vector<std::pair<int, int>> edges) {
  CommGraph g;
  g.n = n;
  g.adjacency.assign(static_cast<std::size_t>(n), {});
  for (auto& [a, b] : edges) {
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    g.edges.emplace_back(a, b);
    g.adjacency[static_cast<std::size_t>(a)].push_back(b);
    g.adjacency[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
  return g;
}

CommGraph comm_graph(const std::vector<Vec2>& positions, double r_c) {
  const int n = static_cast<int>(positions.size());
  std::vector<std::pair<int, int>> edges;
  const double r2 = r_c * r_c;
  for (int i = 0; i < n; ++i) {
    for (int q = i + 1; q < n; ++q) {
      if ((positions[static_cast<std::size_t>(q)] - positions[static_cast<std::size_t>(i)]).squaredNorm() < r2) {
        edges.emplace_back(i, q);
      }
    }
  }
  return make_graph(n, std::move(edges));
}

std::vector<std::vector<int>> connected_components(const CommGraph& g) {
  std::vector<int> label(static_cast<std::size_t>(g.n), -1);
  std::vector<std::vector<int>> components;
  for (int start = 0; start < g.n; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(components.size());
    std::vector<int> members{start};
    label[static_cast<std::size_t>(start)] = id;
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (int nb : g.neighbors(members[head])) {
        if (label[static_cast<std::size_t>(nb)] < 0) {
          label[static_cast<std::size_t>(nb)] = id;
          members.push_back(nb);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

}  // namespace swarm
