#pragma once

// Task assignment as a minimum-cost maximum-flow problem with lower flow
// bounds (TAMM): network construction per UAV/target regime, lower-bound
// elimination through a super source/sink, successive-shortest-path MCMF and
// extraction of the UAV -> target mapping.

#include "swarm/world.hpp"

#include <Eigen/Core>

#include <limits>
#include <map>
#include <span>
#include <vector>

namespace swarm {

using RewardMatrix = Eigen::MatrixXd;  // rows: UAVs, cols: targets

inline constexpr int kCoverageTask = -1;
inline constexpr int kInfiniteCapacity = std::numeric_limits<int>::max() / 4;

/// Capacity regime chosen from N_u, N_tau and the sum of per-target caps.
enum class Regime {
  Surplus,       // N_u >= sum n_j: every target gets exactly n_j trackers
  Intermediate,  // N_tau < N_u < sum n_j: every UAV tracks, every target >= 1
  Scarce,        // N_tau >= N_u: every UAV tracks a distinct target
};

const char* regime_name(Regime r);
Regime classify_regime(int num_uavs, int num_targets, int cap_sum);

struct Bounds {
  int lower = 0;
  int upper = 0;
};

/// Bounds of (s -> U_i) and (T_j -> t) arcs for a regime (U -> T is always [0, 1]).
Bounds source_arc_bounds(Regime r);
Bounds sink_arc_bounds(Regime r, int cap);

struct Arc {
  int from = 0;
  int to = 0;
  int lower = 0;
  int upper = 0;
  double cost = 0.0;
  long tie = 0;  // secondary cost, compared only when costs are equal
};

/// Capacity network. Vertex layout from build_network:
/// s = 0, U_i = 1 + i, T_j = 1 + N_u + j, t = 1 + N_u + N_tau.
struct FlowNetwork {
  int num_vertices = 0;
  int source = 0;
  int sink = 0;
  std::vector<Arc> arcs;

  int num_uavs = 0;
  int num_targets = 0;
  Regime regime = Regime::Surplus;

  int uav_vertex(int i) const { return 1 + i; }
  int target_vertex(int j) const { return 1 + num_uavs + j; }
  /// Index of arc (U_i -> T_j) in `arcs`.
  int uav_target_arc(int i, int j) const { return num_uavs + i * num_targets + j; }
};

/// Lower-bound-free network plus the bookkeeping to map its flow back.
struct ReducedNetwork {
  FlowNetwork net;                     // source = s', sink = t'; every lower bound 0
  std::vector<std::vector<int>> path;  // per reduced arc: original arc ids it stands for
  int return_arc = -1;                 // id used in `path` for the added (t -> s) arc
  int required_flow = 0;               // total s' capacity; a feasible original flow saturates it
};

struct FlowResult {
  std::vector<int> flow;  // per arc of the solved network
  int value = 0;
  double cost = 0.0;
};

struct Assignment {
  std::vector<int> task;  // per UAV: target column or kCoverageTask
  Regime regime = Regime::Surplus;
  double reward = 0.0;
};

/// Builds the bounded network. Arc costs on (U_i -> T_j) are shifted to
/// max(R) - R_ij >= 0; the number of saturated U -> T arcs is fixed within a
/// regime, so the shift does not move the optimum. The secondary cost j makes
/// equal-reward alternatives prefer lower target indices.
FlowNetwork build_network(const RewardMatrix& R, std::span<const int> caps);

/// Adds (t -> s) with infinite capacity, moves every lower bound onto super
/// source/sink arcs, deletes zero-capacity arcs and contracts pass-through
/// vertices (capacity = min of the pair, cost = sum). Throws Infeasible if an
/// arc has lower > upper.
ReducedNetwork eliminate_lower_bounds(const FlowNetwork& net);

/// Maximum flow of minimum cost from `source` to `sink` by successive shortest
/// augmenting paths, each found with a FIFO label-correcting search over
/// (cost, tie) pairs ordered lexicographically. Costs must be non-negative and
/// lower bounds zero.
FlowResult mcmf(const FlowNetwork& net, int source, int sink);

/// Flow on the original arcs: eliminated lower bounds plus the flow carried by
/// whichever reduced arc each original arc was folded into.
std::vector<int> restore_flow(const FlowNetwork& original, const ReducedNetwork& reduced,
                              const std::vector<int>& reduced_flow);

/// Reads U -> T unit flows. Throws std::logic_error if a UAV carries more
/// than one unit.
Assignment extract_assignment(const FlowNetwork& original, const std::vector<int>& flow, const RewardMatrix& R);

/// Sum of R(i, task_i) over assigned UAVs in ascending UAV order.
double assignment_reward(const RewardMatrix& R, const std::vector<int>& task);

/// Full pipeline. Throws Infeasible when the bounded network has no
/// feasible flow.
Assignment tamm(const RewardMatrix& R, std::span<const int> caps);

// Reward-matrix consensus ------------------------------------------------------

using RewardRow = std::map<int, double>;      // target id -> reward
using RewardRows = std::map<int, RewardRow>;  // UAV id -> row

/// Synchronous union flooding of reward rows; node i (graph vertex i, UAV id
/// i) merges neighbor row sets for spt_diameter(g, i) rounds.
std::vector<RewardRows> consensus_rewards(const std::vector<RewardRow>& own_rows, const CommGraph& g);

/// Dense matrix over the given UAV and target ids; missing entries are 0.
RewardMatrix assemble_rewards(const RewardRows& rows, std::span<const int> uavs, std::span<const int> targets);

}  // namespace swarm
