// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include "oracles.hpp"
#include "swarm/assignment.hpp"
#include "swarm/engine.hpp"
#include "swarm/evtm.hpp"
#include "swarm/fusion.hpp"
#include "swarm/trace.hpp"

#include <fmt/format.h>

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace swarm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string join(const std::vector<double>& v, int precision) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + fmt::format("{:.{}f}", x, precision);
  return out;
}

struct Instance {
  RewardMatrix R;
  std::vector<int> caps;
  Regime regime;
};

// Random instances, N_u <= 6, N_tau <= 4, rewards U[0, 10], until every regime has `per_regime`.
std::vector<Instance> instances_per_regime(int per_regime, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> reward(0.0, 10.0);
  std::map<Regime, int> count;
  std::vector<Instance> out;
  while (count[Regime::Surplus] < per_regime || count[Regime::Intermediate] < per_regime ||
         count[Regime::Scarce] < per_regime) {
    const int nu = std::uniform_int_distribution<int>(1, 6)(rng);
    const int nt = std::uniform_int_distribution<int>(1, 4)(rng);
    Instance inst;
    inst.caps.resize(static_cast<std::size_t>(nt));
    for (int& c : inst.caps) c = std::uniform_int_distribution<int>(1, 3)(rng);
    inst.R.resize(nu, nt);
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nt; ++j) inst.R(i, j) = reward(rng);
    }
    int sum = 0;
    for (int c : inst.caps) sum += c;
    inst.regime = classify_regime(nu, nt, sum);
    if (count[inst.regime] >= per_regime) continue;
    ++count[inst.regime];
    out.push_back(std::move(inst));
  }
  return out;
}

Outcome criterion1() {
  const auto start = Clock::now();
  const auto instances = instances_per_regime(200, 101);
  int mismatches = 0;
  for (const Instance& inst : instances) {
    const Assignment a = tamm(inst.R, inst.caps);
    const oracle::BruteAssignment b = oracle::brute_force(inst.R, inst.caps);
    if (!b.feasible || a.reward != b.reward) ++mismatches;
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 10.0,
          fmt::format("{} instances (200 per regime), {} mismatches, {:.2f} s", instances.size(), mismatches, t)};
}

struct FullRuns {
  std::vector<double> rate;
  long violations = 0;
  long components = 0;
  std::string first_violation;
};

// 7 UAVs / 4 targets / 1500 steps, seeds 1..20; feeds criteria 2 and 8.
const FullRuns& default_runs() {
  static const FullRuns runs = [] {
    FullRuns out;
    for (int s = 0; s < 20; ++s) {
      ScenarioConfig cfg;
      cfg.seed = 1 + static_cast<std::uint64_t>(s);
      std::stringstream events;
      const RunSummary sum = run_scenario(cfg, {nullptr, &events, false});
      out.rate.push_back(sum.mean_coverage_rate);
      const TraceCheck check = check_trace(events);
      out.violations += check.violations;
      out.components += check.components;
      if (out.first_violation.empty() && !check.details.empty()) out.first_violation = check.details.front();
    }
    return out;
  }();
  return runs;
}

Outcome criterion2() {
  const FullRuns& runs = default_runs();
  std::string detail = fmt::format("20 runs, {} component records, {} violations", runs.components, runs.violations);
  if (!runs.first_violation.empty()) detail += fmt::format(" (first: {})", runs.first_violation);
  return {runs.violations == 0, detail};
}

bool flow_respects_bounds(const FlowNetwork& net, const std::vector<int>& flow) {
  std::vector<long> balance(static_cast<std::size_t>(net.num_vertices), 0);
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    if (flow[e] < net.arcs[e].lower || flow[e] > net.arcs[e].upper) return false;
    balance[static_cast<std::size_t>(net.arcs[e].from)] -= flow[e];
    balance[static_cast<std::size_t>(net.arcs[e].to)] += flow[e];
  }
  for (int v = 0; v < net.num_vertices; ++v) {
    if (v != net.source && v != net.sink && balance[static_cast<std::size_t>(v)] != 0) return false;
  }
  return true;
}

Outcome criterion3() {
  const auto instances = instances_per_regime(100, 202);
  int violations = 0;
  for (const Instance& inst : instances) {
    const FlowNetwork net = build_network(inst.R, inst.caps);
    const ReducedNetwork red = eliminate_lower_bounds(net);
    const FlowResult f = mcmf(red.net, red.net.source, red.net.sink);
    if (f.value != red.required_flow || !flow_respects_bounds(net, restore_flow(net, red, f.flow))) ++violations;
  }
  return {violations == 0, fmt::format("{} instances (100 per regime), {} violations", instances.size(), violations)};
}

double time_tamm(int nu, int nt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> reward(0.0, 10.0);
  RewardMatrix R(nu, nt);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nt; ++j) R(i, j) = reward(rng);
  }
  const std::vector<int> caps(static_cast<std::size_t>(nt), 2);
  const auto start = Clock::now();
  const Assignment a = tamm(R, caps);
  const double t = seconds_since(start);
  if (a.task.size() != static_cast<std::size_t>(nu)) throw std::logic_error("wrong assignment size");
  return t;
}

Outcome criterion4() {
  double worst_large = 0.0, worst_wide = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    worst_large = std::max(worst_large, time_tamm(80, 100, 300 + s));
    worst_wide = std::max(worst_wide, time_tamm(120, 30, 400 + s));
  }
  return {worst_large < 0.5 && worst_wide < 0.25,
          fmt::format("80x100 worst of 5: {:.4f} s (< 0.5), 120x30 worst of 5: {:.4f} s (< 0.25)", worst_large, worst_wide)};
}

Outcome criterion5() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> rho(0.01, 10.0);
  std::bernoulli_distribution knows(0.7);
  const GridGeometry geom{8, 8, 20.0, {0.0, 0.0}};
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const int targets = std::uniform_int_distribution<int>(1, 3)(rng);
    const CommGraph g = oracle::random_connected_graph(n, std::uniform_real_distribution<double>(0.0, 0.5)(rng), rng);
    std::vector<FusionNode> nodes;
    for (int i = 0; i < n; ++i) {
      FusionNode node{UavState{}, Evtm(geom, 0.0), TrackTable{i, {}}};
      node.state.id = i;
      for (int t = 0; t < targets; ++t) {
        if (!knows(rng)) continue;
        TrackEntry e;
        e.target_id = t;
        e.s_bar << rho(rng), rho(rng), rho(rng), rho(rng);
        const double r = rho(rng);
        e.P_bar = CovMat::Identity() / (4.0 * r);
        e.rho_bar = confidence(e.P_bar);
        e.s_hat = e.s_bar;
        e.P_hat = e.P_bar;
        e.rho_hat = e.rho_bar;
        e.origin = i;
        node.tracks.entries[t] = e;
      }
      nodes.push_back(node);
    }
    const std::vector<FusionNode> before = nodes;
    run_fusion(nodes, g, geom, 3, 0.0);
    for (int t = 0; t < targets; ++t) {
      const TrackEntry* best = nullptr;
      for (const FusionNode& node : before) {
        const auto it = node.tracks.entries.find(t);
        if (it == node.tracks.entries.end()) continue;
        if (best == nullptr || it->second.rho_bar > best->rho_bar) best = &it->second;
      }
      if (best == nullptr) continue;
      for (const FusionNode& node : nodes) {
        const auto it = node.tracks.entries.find(t);
        if (it == node.tracks.entries.end() || it->second.rho_bar != best->rho_bar || it->second.s_bar != best->s_bar ||
            it->second.P_bar != best->P_bar) {
          ++failures;
          break;
        }
      }
    }
  }
  return {failures == 0, fmt::format("1000 topologies, {} targets without exact agreement", failures)};
}

Outcome criterion6() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> elapsed(0.0, 5000.0);
  std::uniform_real_distribution<double> gamma(1e-9, 1.0);
  std::uniform_real_distribution<double> alpha(0.05, 10.0);
  std::uniform_real_distribution<double> beta(0.1, 5.0);
  std::uniform_real_distribution<double> tc(1.0, 1000.0);
  int failures = 0;
  double worst = 0.0;
  double worst_stamped = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const CurveParams p{alpha(rng), beta(rng), tc(rng)};
    const double t_now = 10000.0;
    const double e = elapsed(rng);
    const double g = gamma(rng);
    const double e2 = equivalent_elapsed(e, g, p);
    const double err = std::abs(oracle::lambda(e2, p.alpha, p.beta, p.T_c) -
                                (1.0 - g) * oracle::lambda(e, p.alpha, p.beta, p.T_c));
    worst = std::max(worst, err);
    if (!(err < 1e-9)) ++failures;
    const double after = visit_update(t_now - e, g, t_now, p);
    const double stamped = std::abs(oracle::lambda(t_now - after, p.alpha, p.beta, p.T_c) -
                                    (1.0 - g) * oracle::lambda(e, p.alpha, p.beta, p.T_c));
    worst_stamped = std::max(worst_stamped, stamped);
  }
  return {failures == 0, fmt::format("1e5 tuples, {} failures, worst error {:.3e} (via absolute stamps {:.3e})", failures,
                                     worst, worst_stamped)};
}

struct SweepCell {
  double imt = 0.0;
  double rate = 0.0;
};

SweepCell sweep_cell(ScenarioConfig cfg, int seeds) {
  std::vector<double> imt, rate;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = 1 + static_cast<std::uint64_t>(s);
    const RunSummary sum = run_scenario(cfg);
    imt.push_back(sum.mean_t_imt);
    rate.push_back(sum.mean_coverage_rate);
  }
  return {mean(imt), mean(rate)};
}

// N_u in {3, 5, ..., 13}, 10 seeds each.
const std::map<int, SweepCell>& uav_sweep() {
  static const std::map<int, SweepCell> cells = [] {
    std::map<int, SweepCell> out;
    for (int nu : {3, 5, 7, 9, 11, 13}) {
      ScenarioConfig cfg;
      cfg.uav_count = nu;
      out[nu] = sweep_cell(cfg, 10);
    }
    return out;
  }();
  return cells;
}

Outcome criterion7() {
  const auto start = Clock::now();
  const auto& cells = uav_sweep();
  std::vector<double> imt;
  for (const auto& [nu, cell] : cells) imt.push_back(cell.imt);
  bool decreasing = true;
  for (std::size_t k = 1; k < imt.size(); ++k) decreasing = decreasing && imt[k] < imt[k - 1];
  const double t = seconds_since(start);
  return {decreasing && t < 1800.0, fmt::format("mean t_IMT for N_u 3..13: {} s ({:.0f} s wall)", join(imt, 1), t)};
}

Outcome criterion8() {
  const double m = mean(default_runs().rate);
  // Same 20-seed scale as the 7/4 band check.
  std::vector<double> rate;
  for (int nu : {3, 5, 7, 9, 11}) {
    ScenarioConfig cfg;
    cfg.uav_count = nu;
    rate.push_back(sweep_cell(cfg, 20).rate);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < rate.size(); ++k) monotone = monotone && rate[k] >= rate[k - 1];
  const bool in_band = m >= 0.5 && m <= 0.9;
  return {in_band && monotone,
          fmt::format("7/4 mean rate over 20 seeds {:.4f} (band [0.50, 0.90]); rate for N_u 3..11 (20 seeds): {}", m, join(rate, 3))};
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return rank;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Outcome criterion9() {
  const std::vector<double> ranges{100, 200, 300, 400, 500, 600};
  std::vector<double> imt, rate;
  for (double r_c : ranges) {
    ScenarioConfig cover;
    cover.r_c = r_c;
    cover.coverage_only = true;
    imt.push_back(sweep_cell(cover, 10).imt);
    ScenarioConfig full;
    full.r_c = r_c;
    rate.push_back(sweep_cell(full, 20).rate);
  }
  const double rho = spearman(ranges, imt);
  const double spread = *std::max_element(rate.begin(), rate.end()) - *std::min_element(rate.begin(), rate.end());
  return {rho <= -0.8 && spread <= 0.1,
          fmt::format("coverage-only t_IMT for r_c 100..600: {} (Spearman {:.3f}); full-task rates {} (spread {:.3f})",
                      join(imt, 1), rho, join(rate, 3), spread)};
}

Outcome criterion10() {
  ScenarioConfig cfg;
  cfg.area = {10000.0, 10000.0};
  cfg.uav_count = 50;
  cfg.target_count = 15;
  cfg.steps = 500;
  const auto start = Clock::now();
  run_scenario(cfg);
  const double per_step = seconds_since(start) / 500.0;
  return {per_step < 1.0, fmt::format("50 UAVs / 15 targets / 10 km: {:.4f} s per step", per_step)};
}

Outcome criterion11() {
  ScenarioConfig cfg;
  cfg.seed = 2024;
  std::ostringstream a, b;
  run_scenario(cfg, {&a, nullptr, false});
  run_scenario(cfg, {&b, nullptr, false});
  return {a.str() == b.str() && !a.str().empty(),
          fmt::format("two 1500-step runs, {} bytes each, identical: {}", a.str().size(), a.str() == b.str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3},  {4, criterion4},  {5, criterion5},  {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}, {11, criterion11}};
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

  int failed = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && selected.count(id) == 0) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failed;
    std::cout << fmt::format("criterion {:2}: {} | {}", id, o.pass ? "PASS" : "FAIL", o.detail) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
