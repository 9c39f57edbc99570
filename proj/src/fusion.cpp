#include "swarm/fusion.hpp"

#include <algorithm>

namespace swarm {

CovMat cv_transition(double dt) {
  CovMat F = CovMat::Identity();
  F(0, 1) = dt;
  F(2, 3) = dt;
  return F;
}

CovMat cv_process_noise(double dt, double q_a) {
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  Eigen::Matrix2d block;
  block << dt3 / 3.0, dt2 / 2.0, dt2 / 2.0, dt;
  CovMat Q = CovMat::Zero();
  Q.block<2, 2>(0, 0) = q_a * block;
  Q.block<2, 2>(2, 2) = q_a * block;
  return Q;
}

TrackEntry kalman_predict(const TrackEntry& entry, double dt, double q_a) {
  TrackEntry out = entry;
  const CovMat F = cv_transition(dt);
  out.s_hat = F * entry.s_bar;
  out.P_hat = F * entry.P_bar * F.transpose() + cv_process_noise(dt, q_a);
  out.P_hat = 0.5 * (out.P_hat + out.P_hat.transpose());
  out.rho_hat = confidence(out.P_hat);
  return out;
}

TrackEntry kalman_update(const TrackEntry& entry, const Measurement& z, const UavState& uav,
                         const SensorParams& sensor) {
  const double dx = entry.s_hat(0) - uav.x;
  const double dy = entry.s_hat(2) - uav.y;
  const double r2 = dx * dx + dy * dy;
  if (r2 < 1e-12) throw NumericalFailure("predicted target coincides with the sensor");
  const double r = std::sqrt(r2);

  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 0) = dx / r;
  H(0, 2) = dy / r;
  H(1, 0) = -dy / r2;
  H(1, 2) = dx / r2;

  Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
  R(0, 0) = sensor.sigma_r * sensor.sigma_r;
  R(1, 1) = sensor.sigma_theta * sensor.sigma_theta;

  const Eigen::Matrix2d S = H * entry.P_hat * H.transpose() + R;
  const Eigen::LDLT<Eigen::Matrix2d> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || std::abs(S.determinant()) < 1e-18) {
    throw NumericalFailure("singular innovation covariance");
  }
  const Eigen::Matrix<double, 4, 2> K = ldlt.solve(H * entry.P_hat).transpose();

  Eigen::Vector2d innovation(z.range - r, wrap_angle(z.bearing - std::atan2(dy, dx)));

  TrackEntry out = entry;
  out.s_hat = entry.s_hat + K * innovation;
  // Joseph form keeps the covariance symmetric positive definite.
  const CovMat I_KH = CovMat::Identity() - K * H;
  out.P_hat = I_KH * entry.P_hat * I_KH.transpose() + K * R * K.transpose();
  out.P_hat = 0.5 * (out.P_hat + out.P_hat.transpose());
  out.rho_hat = confidence(out.P_hat);
  out.last_update = z.stamp;
  return out;
}

TrackEntry track_birth(const Measurement& z, const UavState& uav, const FilterParams& params, int owner) {
  TrackEntry e;
  e.target_id = z.target_id;
  e.s_hat << uav.x + z.range * std::cos(z.bearing), 0.0, uav.y + z.range * std::sin(z.bearing), 0.0;
  e.P_hat = CovMat::Zero();
  e.P_hat.diagonal() << params.p0_pos, params.p0_vel, params.p0_pos, params.p0_vel;
  e.rho_hat = confidence(e.P_hat);
  e.s_bar = e.s_hat;
  e.P_bar = e.P_hat;
  e.rho_bar = e.rho_hat;
  e.origin = owner;
  e.last_update = z.stamp;
  return e;
}

int local_filter_step(TrackTable& table, const std::vector<Measurement>& measurements, const UavState& uav,
                      double dt, long step, const FilterParams& params, const SensorParams& sensor) {
  std::erase_if(table.entries, [&](const auto& kv) { return step - kv.second.last_update > params.k_lost; });

  for (auto& [id, entry] : table.entries) {
    entry = kalman_predict(entry, dt, params.q_a);
    entry.origin = table.owner;
  }

  int dropped = 0;
  for (const Measurement& z : measurements) {
    auto it = table.entries.find(z.target_id);
    if (it == table.entries.end()) {
      table.entries.emplace(z.target_id, track_birth(z, uav, params, table.owner));
      continue;
    }
    try {
      it->second = kalman_update(it->second, z, uav, sensor);
    } catch (const NumericalFailure&) {
      ++dropped;
    }
  }

  for (auto& [id, entry] : table.entries) {
    entry.s_bar = entry.s_hat;
    entry.P_bar = entry.P_hat;
    entry.rho_bar = entry.rho_hat;
  }
  return dropped;
}

int spt_diameter(const CommGraph& g, int root) {
  // BFS tree: parent pointers; diameter = max over tree of longest path, found
  // via depth of the two deepest child subtrees at each node.
  std::vector<int> depth(static_cast<std::size_t>(g.n), -1);
  std::vector<int> parent(static_cast<std::size_t>(g.n), -1);
  std::vector<int> order{root};
  depth[static_cast<std::size_t>(root)] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int u = order[head];
    for (int v : g.neighbors(u)) {
      if (depth[static_cast<std::size_t>(v)] < 0) {
        depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
        parent[static_cast<std::size_t>(v)] = u;
        order.push_back(v);
      }
    }
  }
  int diameter = 0;
  std::vector<std::pair<int, int>> top2(static_cast<std::size_t>(g.n), {0, 0});
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    const auto [h1, h2] = top2[static_cast<std::size_t>(u)];
    diameter = std::max(diameter, h1 + h2);
    const int p = parent[static_cast<std::size_t>(u)];
    if (p >= 0) {
      auto& [p1, p2] = top2[static_cast<std::size_t>(p)];
      const int cand = h1 + 1;
      if (cand > p1) {
        p2 = p1;
        p1 = cand;
      } else if (cand > p2) {
        p2 = cand;
      }
    }
  }
  return diameter;
}

namespace {

// Total order for max-consensus: higher confidence wins, then lower origin id.
bool beats(const TrackReport& a, double rho, int origin) {
  return a.rho > rho || (a.rho == rho && a.origin < origin);
}

}  // namespace

void fuse_round(Evtm& evtm, TrackTable& tracks, const std::vector<FusionMessage>& inbox) {
  std::vector<const FusionMessage*> refs;
  for (const FusionMessage& msg : inbox) refs.push_back(&msg);
  fuse_round(evtm, tracks, refs);
}

void fuse_round(Evtm& evtm, TrackTable& tracks, const std::vector<const FusionMessage*>& inbox) {
  for (const FusionMessage* message : inbox) {
    const FusionMessage& msg = *message;
    merge_max(evtm, msg.local_map);
    for (const TrackReport& rep : msg.tracks) {
      auto it = tracks.entries.find(rep.target_id);
      if (it == tracks.entries.end()) {
        TrackEntry e;
        e.target_id = rep.target_id;
        e.s_hat = e.s_bar = rep.s;
        e.P_hat = e.P_bar = rep.P;
        e.rho_hat = e.rho_bar = rep.rho;
        e.origin = rep.origin;
        e.last_update = rep.last_update;
        tracks.entries.emplace(rep.target_id, e);
        continue;
      }
      TrackEntry& e = it->second;
      if (beats(rep, e.rho_bar, e.origin)) {
        e.s_bar = rep.s;
        e.P_bar = rep.P;
        e.rho_bar = rep.rho;
        e.origin = rep.origin;
        e.last_update = rep.last_update;
      }
    }
  }
}

std::vector<FusionOutput> run_fusion(std::vector<FusionNode>& nodes, const CommGraph& g, const GridGeometry& geometry,
                                     int L, double t_now, std::vector<FusionMessage>* message_log) {
  const std::size_t n = nodes.size();
  std::vector<FusionOutput> out(n);
  std::vector<Cell> anchors(n);
  int max_rounds = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i].rounds = spt_diameter(g, static_cast<int>(i));
    max_rounds = std::max(max_rounds, out[i].rounds);
    anchors[i] = geometry.cell_of(nodes[i].state.x, nodes[i].state.y);
  }

  std::vector<FusionMessage> broadcast(n);
  for (int d = 1; d <= max_rounds; ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      FusionMessage& msg = broadcast[i];
      msg.sender = static_cast<int>(i);
      msg.uav_state = nodes[i].state;
      msg.local_map = extract(nodes[i].evtm, anchors[i], L, t_now);
      msg.tracks.clear();
      for (const auto& [id, entry] : nodes[i].tracks.entries) msg.tracks.push_back(entry.fused_report());
    }
    if (d == 1 && message_log != nullptr) *message_log = broadcast;

    std::vector<const FusionMessage*> inbox;
    for (std::size_t i = 0; i < n; ++i) {
      if (d > out[i].rounds) continue;
      inbox.clear();
      for (int nb : g.neighbors(static_cast<int>(i))) inbox.push_back(&broadcast[static_cast<std::size_t>(nb)]);
      fuse_round(nodes[i].evtm, nodes[i].tracks, inbox);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    out[i].compressed = compress(nodes[i].evtm, anchors[i], t_now);
    out[i].local = extract(nodes[i].evtm, anchors[i], L, t_now);
  }
  return out;
}

}  // namespace swarm
