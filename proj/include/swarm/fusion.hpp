#pragma once

// Distributed information fusion: local Kalman filtering of targets, perceptual
// confidence scoring and synchronous max-consensus over the communication
// graph, terminated after the SPT diameter of each node.

#include "swarm/evtm.hpp"
#include "swarm/sensing.hpp"
#include "swarm/world.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <vector>

namespace swarm {

using StateVec = Eigen::Vector4d;  // (x, xdot, y, ydot)
using CovMat = Eigen::Matrix4d;

struct FilterParams {
  double q_a = 0.5;       // white-acceleration intensity, m^2/s^3
  double p0_pos = 100.0;  // birth position variance, m^2
  double p0_vel = 25.0;   // birth velocity variance, (m/s)^2
  int k_lost = 30;        // steps without any measurement before a track is dropped
};

/// Estimate triple exchanged during consensus. `origin` is the UAV whose filter
/// produced it; `last_update` the step of the newest measurement folded in.
struct TrackReport {
  int target_id = 0;
  StateVec s = StateVec::Zero();
  CovMat P = CovMat::Identity();
  double rho = 0.0;
  int origin = 0;
  long last_update = 0;
};

struct TrackEntry {
  int target_id = 0;
  // Local filter output for the current step.
  StateVec s_hat = StateVec::Zero();
  CovMat P_hat = CovMat::Identity();
  double rho_hat = 0.0;
  // Consensus result; seeds the next step's prediction.
  StateVec s_bar = StateVec::Zero();
  CovMat P_bar = CovMat::Identity();
  double rho_bar = 0.0;
  int origin = 0;
  long last_update = 0;

  TrackReport fused_report() const { return {target_id, s_bar, P_bar, rho_bar, origin, last_update}; }
};

struct TrackTable {
  int owner = 0;
  std::map<int, TrackEntry> entries;  // keyed by target id
};

/// One UAV's broadcast for a single consensus round.
struct FusionMessage {
  int sender = 0;
  UavState uav_state;
  LocalMap local_map;
  std::vector<TrackReport> tracks;
};

/// Inverse trace of a covariance.
inline double confidence(const CovMat& P) { return 1.0 / P.trace(); }

/// Nearly-constant-velocity transition and white-acceleration process noise.
CovMat cv_transition(double dt);
CovMat cv_process_noise(double dt, double q_a);

/// Constant-velocity prediction of the local triple (s_hat, P_hat); rho_hat is
/// recomputed.
TrackEntry kalman_predict(const TrackEntry& entry, double dt, double q_a);

/// Extended-filter update of the local triple with one range-bearing
/// measurement taken from `uav`. Throws NumericalFailure when the innovation
/// covariance is singular or the predicted target sits on the UAV.
TrackEntry kalman_update(const TrackEntry& entry, const Measurement& z, const UavState& uav,
                         const SensorParams& sensor);

/// New track from a first measurement: measured position, zero velocity.
TrackEntry track_birth(const Measurement& z, const UavState& uav, const FilterParams& params, int owner);

/// Algorithm-1 lines 1-4 for one UAV: drop stale tracks, predict every track
/// from its fused estimate, fold in this step's measurements and birth new
/// tracks. Leaves s_bar/P_bar equal to the local result (round-0 consensus
/// state). Returns the number of updates dropped for numerical reasons.
int local_filter_step(TrackTable& table, const std::vector<Measurement>& measurements, const UavState& uav,
                      double dt, long step, const FilterParams& params, const SensorParams& sensor);

/// Diameter (in hops) of the BFS shortest-path tree rooted at `root` over the
/// root's connected component. Isolated node -> 0.
int spt_diameter(const CommGraph& g, int root);

/// One synchronous max-consensus round at one node: EVTM cells take the max
/// over received windows; each target's (s, P, rho) is replaced by the
/// highest-rho triple among self and senders (ties: lowest origin id).
void fuse_round(Evtm& evtm, TrackTable& tracks, const std::vector<FusionMessage>& inbox);
void fuse_round(Evtm& evtm, TrackTable& tracks, const std::vector<const FusionMessage*>& inbox);

/// Per-UAV state taking part in the fusion phase.
struct FusionNode {
  UavState state;
  Evtm evtm;
  TrackTable tracks;
};

struct FusionOutput {
  int rounds = 0;  // D_i
  CompressedMap compressed;
  LocalMap local;
};

/// Runs the synchronous exchange for every node of `g` (node index == graph
/// vertex). Node i updates for D_i rounds; nodes that have finished keep
/// broadcasting their final state while others are still iterating.
/// `message_log`, when given, receives the round-0 broadcasts.
std::vector<FusionOutput> run_fusion(std::vector<FusionNode>& nodes, const CommGraph& g, const GridGeometry& geometry,
                                     int L, double t_now, std::vector<FusionMessage>* message_log = nullptr);

}  // namespace swarm
