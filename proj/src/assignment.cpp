#include "swarm/assignment.hpp"

#include "swarm/common.hpp"
#include "swarm/fusion.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace swarm {

namespace {

constexpr double kCostEps = 1e-9;

struct Label {
  double cost = 0.0;
  long tie = 0;
};

bool shorter(const Label& a, const Label& b) {
  if (a.cost < b.cost - kCostEps) return true;
  if (a.cost > b.cost + kCostEps) return false;
  return a.tie < b.tie;
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Surplus:
      return "surplus";
    case Regime::Intermediate:
      return "intermediate";
    case Regime::Scarce:
      return "scarce";
  }
  return "?";
}

Regime classify_regime(int num_uavs, int num_targets, int cap_sum) {
  if (num_uavs >= cap_sum) return Regime::Surplus;
  if (num_targets >= num_uavs) return Regime::Scarce;
  return Regime::Intermediate;
}

Bounds source_arc_bounds(Regime r) { return r == Regime::Surplus ? Bounds{0, 1} : Bounds{1, 1}; }

Bounds sink_arc_bounds(Regime r, int cap) {
  switch (r) {
    case Regime::Surplus:
      return {cap, cap};
    case Regime::Intermediate:
      return {1, cap};
    case Regime::Scarce:
      return {0, 1};
  }
  return {0, cap};
}

FlowNetwork build_network(const RewardMatrix& R, std::span<const int> caps) {
  const int nu = static_cast<int>(R.rows());
  const int nt = static_cast<int>(R.cols());
  if (static_cast<int>(caps.size()) != nt) throw std::invalid_argument("caps size differs from reward columns");
  for (int c : caps) {
    if (c < 1) throw std::invalid_argument("per-target cap must be at least 1");
  }
  if (!R.allFinite()) throw std::invalid_argument("reward matrix must be finite");

  FlowNetwork net;
  net.num_uavs = nu;
  net.num_targets = nt;
  net.num_vertices = nu + nt + 2;
  net.source = 0;
  net.sink = nu + nt + 1;
  net.regime = classify_regime(nu, nt, std::accumulate(caps.begin(), caps.end(), 0));

  const double r_max = R.size() > 0 ? R.maxCoeff() : 0.0;
  const Bounds sb = source_arc_bounds(net.regime);
  for (int i = 0; i < nu; ++i) net.arcs.push_back({net.source, net.uav_vertex(i), sb.lower, sb.upper, 0.0, 0});
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nt; ++j) net.arcs.push_back({net.uav_vertex(i), net.target_vertex(j), 0, 1, r_max - R(i, j), j});
  }
  for (int j = 0; j < nt; ++j) {
    const Bounds tb = sink_arc_bounds(net.regime, caps[static_cast<std::size_t>(j)]);
    net.arcs.push_back({net.target_vertex(j), net.sink, tb.lower, tb.upper, 0.0, 0});
  }
  return net;
}

ReducedNetwork eliminate_lower_bounds(const FlowNetwork& net) {
  const int n = net.num_vertices;
  const int s_prime = n;
  const int t_prime = n + 1;
  const int return_id = static_cast<int>(net.arcs.size());

  struct Work {
    Arc arc;
    std::vector<int> path;
    bool alive = true;
  };
  std::vector<Work> work;
  std::vector<long> excess(static_cast<std::size_t>(n), 0);  // f_in - f_out of lower bounds

  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    const Arc& a = net.arcs[e];
    if (a.lower < 0 || a.lower > a.upper) throw Infeasible("arc lower bound exceeds its upper bound");
    excess[static_cast<std::size_t>(a.to)] += a.lower;
    excess[static_cast<std::size_t>(a.from)] -= a.lower;
    work.push_back({{a.from, a.to, 0, a.upper - a.lower, a.cost, a.tie}, {static_cast<int>(e)}, true});
  }
  work.push_back({{net.sink, net.source, 0, kInfiniteCapacity, 0.0, 0}, {return_id}, true});

  ReducedNetwork out;
  out.return_arc = return_id;
  for (int v = 0; v < n; ++v) {
    const long ex = excess[static_cast<std::size_t>(v)];
    if (ex >= 0) {
      work.push_back({{s_prime, v, 0, static_cast<int>(ex), 0.0, 0}, {}, true});
      out.required_flow += static_cast<int>(ex);
    } else {
      work.push_back({{v, t_prime, 0, static_cast<int>(-ex), 0.0, 0}, {}, true});
    }
  }

  for (Work& w : work) {
    if (w.arc.upper == 0) w.alive = false;
  }

  // Contract pass-through vertices.
  std::vector<std::vector<int>> in(static_cast<std::size_t>(n + 2));
  std::vector<std::vector<int>> outs(static_cast<std::size_t>(n + 2));
  for (std::size_t k = 0; k < work.size(); ++k) {
    if (!work[k].alive) continue;
    in[static_cast<std::size_t>(work[k].arc.to)].push_back(static_cast<int>(k));
    outs[static_cast<std::size_t>(work[k].arc.from)].push_back(static_cast<int>(k));
  }
  auto live = [&](std::vector<int>& ids) {
    std::erase_if(ids, [&](int k) { return !work[static_cast<std::size_t>(k)].alive; });
    return ids.size();
  };
  for (int v = 0; v < n; ++v) {
    auto& vin = in[static_cast<std::size_t>(v)];
    auto& vout = outs[static_cast<std::size_t>(v)];
    if (live(vin) != 1 || live(vout) != 1) continue;
    const int ka = vin.front();
    const int kb = vout.front();
    if (ka == kb) {
      work[static_cast<std::size_t>(ka)].alive = false;
      continue;
    }
    Work& a = work[static_cast<std::size_t>(ka)];
    Work& b = work[static_cast<std::size_t>(kb)];
    a.alive = false;
    b.alive = false;
    if (a.arc.from == b.arc.to) continue;
    Work merged;
    merged.arc = {a.arc.from, b.arc.to, 0, std::min(a.arc.upper, b.arc.upper), a.arc.cost + b.arc.cost,
                  a.arc.tie + b.arc.tie};
    merged.path = a.path;
    merged.path.insert(merged.path.end(), b.path.begin(), b.path.end());
    const int k = static_cast<int>(work.size());
    work.push_back(std::move(merged));
    outs[static_cast<std::size_t>(work.back().arc.from)].push_back(k);
    in[static_cast<std::size_t>(work.back().arc.to)].push_back(k);
  }

  out.net.num_vertices = n + 2;
  out.net.source = s_prime;
  out.net.sink = t_prime;
  out.net.num_uavs = net.num_uavs;
  out.net.num_targets = net.num_targets;
  out.net.regime = net.regime;
  for (Work& w : work) {
    if (!w.alive) continue;
    out.net.arcs.push_back(w.arc);
    out.path.push_back(std::move(w.path));
  }
  return out;
}

FlowResult mcmf(const FlowNetwork& net, int source, int sink) {
  const std::size_t n = static_cast<std::size_t>(net.num_vertices);
  const std::size_t m = net.arcs.size();
  // Residual edge 2e is arc e, 2e + 1 its reverse.
  std::vector<int> cap(2 * m);
  std::vector<std::vector<int>> adj(n);
  for (std::size_t e = 0; e < m; ++e) {
    const Arc& a = net.arcs[e];
    if (a.lower != 0) throw std::invalid_argument("mcmf requires zero lower bounds");
    if (a.cost < -kCostEps) throw std::invalid_argument("mcmf requires non-negative costs");
    cap[2 * e] = a.upper;
    cap[2 * e + 1] = 0;
    adj[static_cast<std::size_t>(a.from)].push_back(static_cast<int>(2 * e));
    adj[static_cast<std::size_t>(a.to)].push_back(static_cast<int>(2 * e + 1));
  }
  auto head = [&](int r) {
    const Arc& a = net.arcs[static_cast<std::size_t>(r / 2)];
    return (r % 2 == 0) ? a.to : a.from;
  };
  auto edge_label = [&](int r) {
    const Arc& a = net.arcs[static_cast<std::size_t>(r / 2)];
    return (r % 2 == 0) ? Label{a.cost, a.tie} : Label{-a.cost, -a.tie};
  };

  FlowResult result;
  result.flow.assign(m, 0);
  if (source == sink) return result;

  std::vector<Label> dist(n);
  std::vector<char> reached(n);
  std::vector<char> queued(n);
  std::vector<int> via(n);
  std::deque<int> queue;
  const std::size_t relax_limit = (n + 1) * (2 * m + 1) + 16;
  for (;;) {
    std::fill(reached.begin(), reached.end(), 0);
    std::fill(queued.begin(), queued.end(), 0);
    std::fill(via.begin(), via.end(), -1);
    dist[static_cast<std::size_t>(source)] = {};
    reached[static_cast<std::size_t>(source)] = 1;
    queue.assign(1, source);
    std::size_t relaxations = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      queued[static_cast<std::size_t>(u)] = 0;
      for (int r : adj[static_cast<std::size_t>(u)]) {
        if (cap[static_cast<std::size_t>(r)] <= 0) continue;
        const int v = head(r);
        const Label w = edge_label(r);
        const Label cand{dist[static_cast<std::size_t>(u)].cost + w.cost, dist[static_cast<std::size_t>(u)].tie + w.tie};
        const auto vi = static_cast<std::size_t>(v);
        if (reached[vi] && !shorter(cand, dist[vi])) continue;
        if (++relaxations > relax_limit) throw NumericalFailure("shortest-path search failed to converge");
        dist[vi] = cand;
        reached[vi] = 1;
        via[vi] = r;
        if (!queued[vi]) {
          queued[vi] = 1;
          queue.push_back(v);
        }
      }
    }
    if (!reached[static_cast<std::size_t>(sink)]) break;

    int push = kInfiniteCapacity;
    for (int v = sink; v != source;) {
      const int r = via[static_cast<std::size_t>(v)];
      push = std::min(push, cap[static_cast<std::size_t>(r)]);
      v = head(r ^ 1);
    }
    if (push >= kInfiniteCapacity) throw std::invalid_argument("unbounded flow: augmenting path of infinite capacity");
    for (int v = sink; v != source;) {
      const int r = via[static_cast<std::size_t>(v)];
      cap[static_cast<std::size_t>(r)] -= push;
      cap[static_cast<std::size_t>(r ^ 1)] += push;
      v = head(r ^ 1);
    }
    result.value += push;
  }

  for (std::size_t e = 0; e < m; ++e) {
    result.flow[e] = cap[2 * e + 1];
    result.cost += result.flow[e] * net.arcs[e].cost;
  }
  return result;
}

std::vector<int> restore_flow(const FlowNetwork& original, const ReducedNetwork& reduced,
                              const std::vector<int>& reduced_flow) {
  std::vector<int> flow(original.arcs.size());
  for (std::size_t e = 0; e < original.arcs.size(); ++e) flow[e] = original.arcs[e].lower;
  for (std::size_t k = 0; k < reduced.path.size(); ++k) {
    for (int id : reduced.path[k]) {
      if (id == reduced.return_arc) continue;
      flow[static_cast<std::size_t>(id)] += reduced_flow[k];
    }
  }
  return flow;
}

double assignment_reward(const RewardMatrix& R, const std::vector<int>& task) {
  double total = 0.0;
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task[i] != kCoverageTask) total += R(static_cast<Eigen::Index>(i), task[i]);
  }
  return total;
}

Assignment extract_assignment(const FlowNetwork& original, const std::vector<int>& flow, const RewardMatrix& R) {
  Assignment out;
  out.regime = original.regime;
  out.task.assign(static_cast<std::size_t>(original.num_uavs), kCoverageTask);
  for (int i = 0; i < original.num_uavs; ++i) {
    for (int j = 0; j < original.num_targets; ++j) {
      const int f = flow[static_cast<std::size_t>(original.uav_target_arc(i, j))];
      if (f == 0) continue;
      if (f != 1 || out.task[static_cast<std::size_t>(i)] != kCoverageTask) {
        throw std::logic_error("flow assigns a UAV to more than one target");
      }
      out.task[static_cast<std::size_t>(i)] = j;
    }
  }
  out.reward = assignment_reward(R, out.task);
  return out;
}

Assignment tamm(const RewardMatrix& R, std::span<const int> caps) {
  const FlowNetwork net = build_network(R, caps);
  const ReducedNetwork reduced = eliminate_lower_bounds(net);
  const FlowResult solved = mcmf(reduced.net, reduced.net.source, reduced.net.sink);
  if (solved.value != reduced.required_flow) throw Infeasible("bounded assignment network has no feasible flow");
  return extract_assignment(net, restore_flow(net, reduced, solved.flow), R);
}

std::vector<RewardRows> consensus_rewards(const std::vector<RewardRow>& own_rows, const CommGraph& g) {
  if (static_cast<int>(own_rows.size()) != g.n) throw std::invalid_argument("one reward row per graph vertex required");
  std::vector<RewardRows> state(own_rows.size());
  std::vector<int> rounds(own_rows.size());
  int max_rounds = 0;
  for (int i = 0; i < g.n; ++i) {
    state[static_cast<std::size_t>(i)][i] = own_rows[static_cast<std::size_t>(i)];
    rounds[static_cast<std::size_t>(i)] = spt_diameter(g, i);
    max_rounds = std::max(max_rounds, rounds[static_cast<std::size_t>(i)]);
  }
  for (int d = 1; d <= max_rounds; ++d) {
    const std::vector<RewardRows> sent = state;
    for (int i = 0; i < g.n; ++i) {
      if (d > rounds[static_cast<std::size_t>(i)]) continue;
      for (int q : g.neighbors(i)) {
        for (const auto& [uav, row] : sent[static_cast<std::size_t>(q)]) state[static_cast<std::size_t>(i)].emplace(uav, row);
      }
    }
  }
  return state;
}

RewardMatrix assemble_rewards(const RewardRows& rows, std::span<const int> uavs, std::span<const int> targets) {
  RewardMatrix R = RewardMatrix::Zero(static_cast<Eigen::Index>(uavs.size()), static_cast<Eigen::Index>(targets.size()));
  for (std::size_t a = 0; a < uavs.size(); ++a) {
    const auto row = rows.find(uavs[a]);
    if (row == rows.end()) continue;
    for (std::size_t b = 0; b < targets.size(); ++b) {
      const auto cell = row->second.find(targets[b]);
      if (cell != row->second.end()) R(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cell->second;
    }
  }
  return R;
}

}  // namespace swarm
