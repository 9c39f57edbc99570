#include "oracles.hpp"
#include "swarm/fusion.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace swarm;

namespace {

TrackEntry entry_with(int target, double rho_scale, int origin) {
  TrackEntry e;
  e.target_id = target;
  e.s_bar << origin * 10.0, 1.0, origin * -3.0, 0.5;
  e.P_bar = CovMat::Identity() / rho_scale * 0.25;  // trace = 1 / rho_scale
  e.rho_bar = confidence(e.P_bar);
  e.s_hat = e.s_bar;
  e.P_hat = e.P_bar;
  e.rho_hat = e.rho_bar;
  e.origin = origin;
  return e;
}

GridGeometry small_grid() { return GridGeometry{6, 6, 20.0, {0.0, 0.0}}; }

std::vector<FusionNode> nodes_with_rho(const std::vector<double>& rho, int target = 0) {
  std::vector<FusionNode> nodes;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    FusionNode n{UavState{}, Evtm(small_grid(), 0.0), TrackTable{static_cast<int>(i), {}}};
    n.state.id = static_cast<int>(i);
    n.tracks.entries[target] = entry_with(target, rho[i], static_cast<int>(i));
    nodes.push_back(n);
  }
  return nodes;
}

// Diameter of the BFS tree (lowest-id neighbors first) via all-pairs tree distances.
int tree_diameter_oracle(const CommGraph& g, int root) {
  std::vector<int> parent(g.n, -2);
  std::vector<int> queue{root};
  parent[root] = -1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (int v : g.neighbors(queue[h])) {
      if (parent[v] == -2) {
        parent[v] = queue[h];
        queue.push_back(v);
      }
    }
  }
  std::vector<std::pair<int, int>> tree;
  for (int v : queue) {
    if (parent[v] >= 0) tree.emplace_back(std::min(v, parent[v]), std::max(v, parent[v]));
  }
  const CommGraph t = make_graph(g.n, tree);
  int best = 0;
  for (int s : queue) {
    std::vector<int> dist(g.n, -1);
    std::vector<int> q{s};
    dist[s] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      for (int v : t.neighbors(q[h])) {
        if (dist[v] < 0) {
          dist[v] = dist[q[h]] + 1;
          q.push_back(v);
          best = std::max(best, dist[v]);
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST(KalmanPredict, NoiselessConstantVelocity) {
  TrackEntry e;
  e.s_bar << 0.0, 5.0, 0.0, 0.0;
  e.P_bar = CovMat::Identity();
  const TrackEntry p = kalman_predict(e, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(p.s_hat(0), 5.0);
  EXPECT_DOUBLE_EQ(p.s_hat(1), 5.0);
  EXPECT_DOUBLE_EQ(p.s_hat(2), 0.0);
  EXPECT_DOUBLE_EQ(p.s_hat(3), 0.0);
}

TEST(KalmanPredict, TraceGrowsWithProcessNoise) {
  TrackEntry e;
  e.s_bar << 1.0, 2.0, 3.0, 4.0;
  e.P_bar = CovMat::Identity() * 3.0;
  const TrackEntry p = kalman_predict(e, 1.0, 0.5);
  EXPECT_GT(p.P_hat.trace(), e.P_bar.trace());
  EXPECT_DOUBLE_EQ(p.rho_hat, 1.0 / p.P_hat.trace());
}

TEST(KalmanPredict, TwoHalfStepsEqualOneStep) {
  const CovMat half = cv_transition(0.5);
  EXPECT_TRUE((half * half).isApprox(cv_transition(1.0), 1e-15));
  TrackEntry e;
  e.s_bar << 2.0, -1.5, 7.0, 0.25;
  e.P_bar = CovMat::Identity();
  TrackEntry a = kalman_predict(e, 0.5, 0.0);
  a.s_bar = a.s_hat;
  a.P_bar = a.P_hat;
  a = kalman_predict(a, 0.5, 0.0);
  const TrackEntry b = kalman_predict(e, 1.0, 0.0);
  EXPECT_TRUE(a.s_hat.isApprox(b.s_hat, 1e-14));
}

TEST(KalmanUpdate, ExactMeasurementPullsToTruth) {
  SensorParams sensor;
  sensor.sigma_r = 0.01;
  sensor.sigma_theta = 1e-4;
  UavState uav;
  uav.x = -50.0;
  uav.y = 20.0;
  const Vec2 truth(60.0, 80.0);
  const Vec2 d = truth - uav.position();
  const Measurement z{0, d.norm(), std::atan2(d.y(), d.x()), 0};
  TrackEntry e;
  e.s_hat << 61.0, 0.0, 79.5, 0.0;
  e.P_hat = CovMat::Identity() * 4.0;
  const TrackEntry out = kalman_update(e, z, uav, sensor);
  const double sigma = std::max(sensor.sigma_r, d.norm() * sensor.sigma_theta);
  EXPECT_NEAR(out.s_hat(0), truth.x(), 10.0 * sigma);
  EXPECT_NEAR(out.s_hat(2), truth.y(), 10.0 * sigma);
}

TEST(KalmanUpdate, RepeatedNoisyUpdatesConverge) {
  SensorParams sensor;
  sensor.sigma_r = 0.01;
  sensor.sigma_theta = 1e-4;
  UavState uav;
  uav.x = -50.0;
  uav.y = 20.0;
  const Vec2 truth(60.0, 80.0);
  TrackEntry e;
  e.s_bar << 40.0, 0.0, 95.0, 0.0;
  e.P_bar = CovMat::Identity() * 100.0;
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    e = kalman_predict(e, 1.0, 0.0);
    const auto z = measure(uav, {0, truth.x(), 0.0, truth.y(), 0.0}, rng, sensor, k);
    ASSERT_TRUE(z);
    e = kalman_update(e, *z, uav, sensor);
    e.s_bar = e.s_hat;
    e.P_bar = e.P_hat;
  }
  EXPECT_NEAR(e.s_hat(0), truth.x(), 1.0);
  EXPECT_NEAR(e.s_hat(2), truth.y(), 1.0);
}

TEST(KalmanUpdate, TraceNeverIncreasesAndConfidenceRises) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  const SensorParams sensor;
  for (int trial = 0; trial < 500; ++trial) {
    UavState uav;
    TrackEntry e;
    e.s_hat << u(rng), u(rng) / 20, u(rng), u(rng) / 20;
    if (std::hypot(e.s_hat(0), e.s_hat(2)) < 1.0) continue;
    e.P_hat = CovMat::Identity() * (1.0 + std::abs(u(rng)));
    e.rho_hat = confidence(e.P_hat);
    const auto z = measure(uav, {0, e.s_hat(0) + 3.0, 0.0, e.s_hat(2) - 2.0, 0.0}, rng, sensor);
    if (!z) continue;
    const TrackEntry post = kalman_update(e, *z, uav, sensor);
    ASSERT_LE(post.P_hat.trace(), e.P_hat.trace() + 1e-9);
    ASSERT_GT(post.rho_hat, e.rho_hat);
    ASSERT_DOUBLE_EQ(post.rho_hat, 1.0 / post.P_hat.trace());
    const Eigen::SelfAdjointEigenSolver<CovMat> eig(post.P_hat);
    ASSERT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(KalmanUpdate, CoincidentPredictionThrows) {
  TrackEntry e;
  e.s_hat.setZero();
  UavState uav;
  Measurement z;
  EXPECT_THROW(kalman_update(e, z, uav, SensorParams{}), NumericalFailure);
}

TEST(TrackBirth, MeasuredPositionZeroVelocity) {
  UavState uav;
  uav.x = 10.0;
  uav.y = -5.0;
  Measurement z{3, 100.0, kPi / 2, 42};
  const TrackEntry e = track_birth(z, uav, FilterParams{}, 7);
  EXPECT_NEAR(e.s_hat(0), 10.0, 1e-9);
  EXPECT_NEAR(e.s_hat(2), 95.0, 1e-9);
  EXPECT_EQ(e.s_hat(1), 0.0);
  EXPECT_EQ(e.P_hat(0, 0), 100.0);
  EXPECT_EQ(e.P_hat(1, 1), 25.0);
  EXPECT_EQ(e.origin, 7);
  EXPECT_EQ(e.last_update, 42);
}

TEST(LocalFilter, DropsStaleTracksAndBirthsNew) {
  TrackTable table{0, {}};
  FilterParams params;
  params.k_lost = 3;
  UavState uav;
  const SensorParams sensor;
  local_filter_step(table, {{1, 50.0, 0.0, 1}}, uav, 1.0, 1, params, sensor);
  ASSERT_EQ(table.entries.count(1), 1u);
  for (long k = 2; k <= 4; ++k) local_filter_step(table, {}, uav, 1.0, k, params, sensor);
  EXPECT_EQ(table.entries.count(1), 1u);
  local_filter_step(table, {}, uav, 1.0, 5, params, sensor);
  EXPECT_EQ(table.entries.count(1), 0u);
}

TEST(SptDiameter, Examples) {
  EXPECT_EQ(spt_diameter(make_graph(1, {}), 0), 0);
  EXPECT_EQ(spt_diameter(make_graph(3, {{0, 1}, {1, 2}}), 1), 2);
  EXPECT_EQ(spt_diameter(make_graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}), 0), 2);
  EXPECT_EQ(spt_diameter(make_graph(3, {{0, 1}}), 2), 0);
}

TEST(SptDiameter, MatchesTreeOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const CommGraph g = oracle::random_connected_graph(n, 0.2, rng);
    for (int r = 0; r < n; ++r) ASSERT_EQ(spt_diameter(g, r), tree_diameter_oracle(g, r));
  }
}

TEST(FuseRound, EmptyInboxIsIdentity) {
  auto nodes = nodes_with_rho({2.0});
  const TrackTable before = nodes[0].tracks;
  const Evtm map_before = nodes[0].evtm;
  fuse_round(nodes[0].evtm, nodes[0].tracks, std::vector<FusionMessage>{});
  EXPECT_EQ(nodes[0].evtm, map_before);
  EXPECT_EQ(nodes[0].tracks.entries.at(0).s_bar, before.entries.at(0).s_bar);
}

TEST(FuseRound, HigherConfidenceReplacesWholesale) {
  Evtm map(small_grid(), 0.0);
  TrackTable own{0, {}};
  own.entries[3] = entry_with(3, 1.0, 0);
  FusionMessage msg;
  msg.sender = 1;
  msg.local_map = extract(map, {2, 2}, 3, 0.0);
  const TrackEntry theirs = entry_with(3, 4.0, 1);
  msg.tracks.push_back(theirs.fused_report());
  fuse_round(map, own, std::vector<FusionMessage>{msg});
  const TrackEntry& e = own.entries.at(3);
  EXPECT_EQ(e.s_bar, theirs.s_bar);
  EXPECT_EQ(e.P_bar, theirs.P_bar);
  EXPECT_EQ(e.rho_bar, theirs.rho_bar);
  EXPECT_EQ(e.origin, 1);
}

TEST(FuseRound, UnknownTargetInserted) {
  Evtm map(small_grid(), 0.0);
  TrackTable own{0, {}};
  FusionMessage msg;
  msg.sender = 2;
  msg.local_map = extract(map, {0, 0}, 1, 0.0);
  msg.tracks.push_back(entry_with(9, 1.0, 2).fused_report());
  fuse_round(map, own, std::vector<FusionMessage>{msg});
  ASSERT_EQ(own.entries.count(9), 1u);
  EXPECT_EQ(own.entries.at(9).origin, 2);
}

TEST(FuseRound, EqualConfidenceGoesToLowestOrigin) {
  Evtm map(small_grid(), 0.0);
  TrackTable own{4, {}};
  own.entries[0] = entry_with(0, 2.0, 4);
  FusionMessage a, b;
  a.sender = 3;
  a.local_map = b.local_map = extract(map, {1, 1}, 1, 0.0);
  b.sender = 1;
  a.tracks.push_back(entry_with(0, 2.0, 3).fused_report());
  b.tracks.push_back(entry_with(0, 2.0, 1).fused_report());
  fuse_round(map, own, std::vector<FusionMessage>{a, b});
  EXPECT_EQ(own.entries.at(0).origin, 1);
}

TEST(RunFusion, LineOfThreeReachesMax) {
  auto nodes = nodes_with_rho({1.0, 5.0, 3.0});
  const CommGraph g = make_graph(3, {{0, 1}, {1, 2}});
  const auto out = run_fusion(nodes, g, small_grid(), 3, 0.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].rounds, 2);
    EXPECT_DOUBLE_EQ(nodes[i].tracks.entries.at(0).rho_bar, 5.0);
    EXPECT_EQ(nodes[i].tracks.entries.at(0).origin, 1);
  }
}

TEST(RunFusion, IsolatedNodeKeepsLocalResult) {
  auto nodes = nodes_with_rho({1.5});
  const TrackEntry before = nodes[0].tracks.entries.at(0);
  const auto out = run_fusion(nodes, make_graph(1, {}), small_grid(), 3, 0.0);
  EXPECT_EQ(out[0].rounds, 0);
  EXPECT_EQ(nodes[0].tracks.entries.at(0).s_bar, before.s_bar);
  EXPECT_EQ(nodes[0].tracks.entries.at(0).rho_bar, before.rho_bar);
}

TEST(RunFusion, CompleteGraphAgreesAfterOneExchange) {
  auto nodes = nodes_with_rho({1.0, 2.0, 9.0, 4.0});
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) edges.emplace_back(a, b);
  }
  // One exchange with every neighbor already reaches the maximum.
  std::vector<FusionMessage> all;
  for (int i = 0; i < 4; ++i) {
    FusionMessage m;
    m.sender = i;
    m.local_map = extract(nodes[i].evtm, {2, 2}, 3, 0.0);
    m.tracks.push_back(nodes[i].tracks.entries.at(0).fused_report());
    all.push_back(m);
  }
  auto once = nodes;
  for (int i = 0; i < 4; ++i) {
    std::vector<FusionMessage> inbox;
    for (int j = 0; j < 4; ++j) {
      if (j != i) inbox.push_back(all[j]);
    }
    fuse_round(once[i].evtm, once[i].tracks, inbox);
    EXPECT_DOUBLE_EQ(once[i].tracks.entries.at(0).rho_bar, 9.0);
  }
  // The round budget is the BFS tree diameter, which is 2 for a star.
  const auto out = run_fusion(nodes, make_graph(4, edges), small_grid(), 3, 0.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(out[i].rounds, 2);
    EXPECT_DOUBLE_EQ(nodes[i].tracks.entries.at(0).rho_bar, 9.0);
  }
}

TEST(RunFusion, SmallTopologiesAgreeOnConfidence) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rho(0.1, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const CommGraph g = oracle::random_connected_graph(n, 0.25, rng);
    std::vector<double> r(n);
    for (double& x : r) x = rho(rng);
    auto nodes = nodes_with_rho(r);
    const std::vector<FusionNode> before = nodes;
    run_fusion(nodes, g, small_grid(), 3, 0.0);
    const auto best = std::max_element(r.begin(), r.end()) - r.begin();
    for (int i = 0; i < n; ++i) {
      const TrackEntry& e = nodes[i].tracks.entries.at(0);
      const TrackEntry& src = before[best].tracks.entries.at(0);
      ASSERT_EQ(e.rho_bar, src.rho_bar);
      ASSERT_EQ(e.s_bar, src.s_bar);
      ASSERT_EQ(e.P_bar, src.P_bar);
      ASSERT_EQ(e.origin, src.origin);
    }
  }
}

TEST(RunFusion, FullWindowsGiveIdenticalMaxMaps) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> t(0.0, 100.0);
  const GridGeometry geom = small_grid();
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    const CommGraph g = oracle::random_connected_graph(n, 0.2, rng);
    std::vector<FusionNode> nodes;
    std::vector<double> expected(geom.size(), 0.0);
    for (int i = 0; i < n; ++i) {
      FusionNode node{UavState{}, Evtm(geom, 0.0), TrackTable{i, {}}};
      node.state.x = t(rng);
      node.state.y = t(rng);
      for (int m = 0; m < geom.rows; ++m) {
        for (int c = 0; c < geom.cols; ++c) {
          node.evtm.at(m, c) = t(rng);
          expected[geom.index(m, c)] = std::max(expected[geom.index(m, c)], node.evtm.at(m, c));
        }
      }
      nodes.push_back(node);
    }
    run_fusion(nodes, g, geom, 2 * 6 + 1, 100.0);
    for (int i = 0; i < n; ++i) ASSERT_EQ(nodes[i].evtm.data(), expected);
  }
}

TEST(FuseRound, NeverDecreasesMapOrConfidence) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> t(0.0, 100.0);
  const GridGeometry geom = small_grid();
  for (int trial = 0; trial < 100; ++trial) {
    Evtm map(geom, 0.0);
    for (int m = 0; m < geom.rows; ++m) {
      for (int c = 0; c < geom.cols; ++c) map.at(m, c) = t(rng);
    }
    TrackTable own{0, {}};
    own.entries[0] = entry_with(0, t(rng) / 10 + 0.1, 0);
    Evtm other(geom, 0.0);
    for (int m = 0; m < geom.rows; ++m) {
      for (int c = 0; c < geom.cols; ++c) other.at(m, c) = t(rng);
    }
    FusionMessage msg;
    msg.sender = 1;
    msg.local_map = extract(other, {2, 3}, 3, 100.0);
    msg.tracks.push_back(entry_with(0, t(rng) / 10 + 0.1, 1).fused_report());
    const Evtm before = map;
    const double rho_before = own.entries.at(0).rho_bar;
    fuse_round(map, own, std::vector<FusionMessage>{msg});
    for (std::size_t k = 0; k < geom.size(); ++k) ASSERT_GE(map.data()[k], before.data()[k]);
    ASSERT_GE(own.entries.at(0).rho_bar, rho_before);
  }
}
