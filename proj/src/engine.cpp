#include "swarm/engine.hpp"

#include "swarm/trace.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <ostream>
#include <set>

namespace swarm {

namespace {

enum StreamTag : std::uint32_t { kSenseStream = 1, kTargetMotionStream = 2, kTargetInitStream = 3, kUavInitStream = 4 };

std::mt19937_64 make_rng(std::uint64_t seed, StreamTag tag, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

}  // namespace

double uncovered_time(const std::vector<double>& last_visit, double t_now) {
  if (last_visit.empty()) return 0.0;
  double sum = 0.0;
  for (double t : last_visit) sum += t_now - t;
  return sum / static_cast<double>(last_visit.size());
}

long steady_state_start(const ScenarioConfig& cfg) {
  return static_cast<long>(std::floor(2.0 * cfg.curve.T_c / cfg.dt + 1e-9)) + 1;
}

Engine::Engine(const ScenarioConfig& cfg)
    : cfg_(cfg), geometry_(cfg.geometry()), sensor_(cfg.sensor_params()), coverage_(cfg.coverage_params()),
      actions_(ActionSet::make_default(cfg.uav)) {
  validate(cfg_);

  // Launch lattice around the area center, random initial headings.
  const int n = cfg_.uav_count;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const double cx = 0.5 * cfg_.area.width;
  const double cy = 0.5 * cfg_.area.height;
  for (int i = 0; i < n; ++i) {
    UavState s;
    s.id = i;
    s.x = cx + (i % cols - 0.5 * (cols - 1)) * cfg_.uav_spacing;
    s.y = cy + (i / cols - 0.5 * (rows - 1)) * cfg_.uav_spacing;
    s.v = std::clamp(cfg_.uav_v0, cfg_.uav.v_min, cfg_.uav.v_max);
    std::mt19937_64 init = make_rng(cfg_.seed, kUavInitStream, i);
    s.eta = std::uniform_real_distribution<double>(-kPi, kPi)(init);
    s.h = cfg_.altitude;
    uavs_.push_back(s);
    pending_.push_back({});
    nodes_.push_back({s, Evtm(geometry_, cfg_.t0), TrackTable{i, {}}});
    sense_rng_.push_back(make_rng(cfg_.seed, kSenseStream, i));
  }

  for (int j = 0; j < cfg_.target_count; ++j) {
    std::mt19937_64 init = make_rng(cfg_.seed, kTargetInitStream, j);
    std::uniform_real_distribution<double> ux(0.0, cfg_.area.width);
    std::uniform_real_distribution<double> uy(0.0, cfg_.area.height);
    std::uniform_real_distribution<double> heading(-kPi, kPi);
    std::uniform_real_distribution<double> speed(cfg_.target.v_min, cfg_.target.v_max);
    TargetTruth t;
    t.id = j;
    t.x = ux(init);
    t.y = uy(init);
    const double h = heading(init);
    const double v = speed(init);
    t.xdot = v * std::cos(h);
    t.ydot = v * std::sin(h);
    targets_.push_back(t);
    target_rng_.push_back(make_rng(cfg_.seed, kTargetMotionStream, j));
  }

  last_visit_.assign(geometry_.size(), cfg_.t0);
}

void Engine::sense(double t_now, std::vector<std::vector<Measurement>>& measurements, std::vector<int>& observed) {
  for (std::size_t i = 0; i < uavs_.size(); ++i) {
    const UavState& u = uavs_[i];
    Evtm& map = nodes_[i].evtm;
    for (const Cell& c : visible_grids(u, geometry_, sensor_.r_o)) {
      const double d = std::min((geometry_.center(c) - u.position()).norm(), sensor_.r_o);
      map.at(c) = visit_update(map.at(c), detection_probability(d, sensor_), t_now, cfg_.curve);
      last_visit_[geometry_.index(c.m, c.n)] = t_now;
    }
    for (std::size_t j = 0; j < targets_.size(); ++j) {
      if (auto z = measure(u, targets_[j], sense_rng_[i], sensor_, k_)) {
        measurements[i].push_back(*z);
        observed[j] = 1;
      }
    }
  }
}

void Engine::assign_and_command(const CommGraph& g, const std::vector<FusionOutput>& fused, double t_now,
                                MetricsRecord& rec) {
  const std::size_t n = uavs_.size();
  rec.task.assign(n, kCoverageTask);

  // Tracking plans and own reward rows.
  std::vector<std::map<int, UavCommand>> first_action(n);
  std::vector<RewardRow> own(n);
  if (!cfg_.coverage_only) {
    const PlanMode mode = cfg_.exhaustive ? PlanMode::Exhaustive : PlanMode::Greedy;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [id, entry] : nodes_[i].tracks.entries) {
        try {
          const HorizonPlan plan = plan_tracking(uavs_[i], entry, actions_, cfg_.horizon, cfg_.dt, cfg_.uav, sensor_, mode);
          own[i][id] = plan.reward;
          first_action[i][id] = plan.actions.front();
        } catch (const NumericalFailure& e) {
          spdlog::debug("step {} uav {} target {}: plan failed: {}", k_, i, id, e.what());
        }
      }
    }
  }
  const std::vector<RewardRows> rows = consensus_rewards(own, g);

  for (const std::vector<int>& comp : connected_components(g)) {
    ComponentEvent ce;
    ce.members = comp;
    const RewardRows& shared = rows[static_cast<std::size_t>(comp.front())];
    std::set<int> known;
    for (int member : comp) {
      const auto row = shared.find(member);
      if (row == shared.end()) continue;
      for (const auto& [target, reward] : row->second) known.insert(target);
    }
    ce.targets.assign(known.begin(), known.end());
    ce.caps.assign(ce.targets.size(), cfg_.n_j);
    ce.regime = classify_regime(static_cast<int>(comp.size()), static_cast<int>(ce.targets.size()),
                                static_cast<int>(ce.targets.size()) * cfg_.n_j);
    ce.task.assign(comp.size(), kCoverageTask);

    if (!ce.targets.empty()) {
      const RewardMatrix R = assemble_rewards(shared, comp, ce.targets);
      const auto start = std::chrono::steady_clock::now();
      try {
        const Assignment a = tamm(R, ce.caps);
        for (std::size_t k = 0; k < comp.size(); ++k) {
          const int col = a.task[k];
          ce.task[k] = col == kCoverageTask ? kCoverageTask : ce.targets[static_cast<std::size_t>(col)];
        }
      } catch (const Infeasible& e) {
        ce.fallback = true;
        spdlog::warn("step {}: assignment infeasible, component falls back to coverage: {}", k_, e.what());
      }
      rec.assign_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    for (std::size_t k = 0; k < comp.size(); ++k) rec.task[static_cast<std::size_t>(comp[k])] = ce.task[k];
    event_.components.push_back(std::move(ce));
  }

  // Commands for the next truth step.
  std::vector<UavState> neighbors;
  for (std::size_t i = 0; i < n; ++i) {
    const int task = rec.task[i];
    if (task != kCoverageTask) {
      const auto it = first_action[i].find(task);
      if (it != first_action[i].end()) {
        pending_[i] = it->second;
        continue;
      }
    }
    neighbors.clear();
    for (int q : g.neighbors(static_cast<int>(i))) neighbors.push_back(uavs_[static_cast<std::size_t>(q)]);
    const UavState& u = uavs_[i];
    const std::optional<Vec2> heading = separation_heading(u, neighbors, {}, coverage_);
    const Map3 A = heading_match_map(u, heading, coverage_, cfg_.uav.omega_max, cfg_.dt, geometry_);
    const RewardMaps maps = reward_maps(nodes_[i].evtm, fused[i].compressed, u, cfg_.curve, t_now, sensor_.r_o);
    const Ocrm j = ocrm(maps.F, maps.Q, A, coverage_, geometry_.cell_of(u.x, u.y));
    pending_[i] = coverage_command(u, j, cfg_.dt, cfg_.uav, geometry_).command;
  }
}

MetricsRecord Engine::step() {
  ++k_;
  const double t_now = cfg_.t0 + static_cast<double>(k_) * cfg_.dt;
  MetricsRecord rec;
  rec.step = k_;
  event_ = StepEvent{};
  event_.step = k_;
  event_.t = t_now;

  // Truth.
  for (std::size_t i = 0; i < uavs_.size(); ++i) {
    uavs_[i] = step_uav(uavs_[i], pending_[i], cfg_.dt, cfg_.uav);
    nodes_[i].state = uavs_[i];
  }
  for (std::size_t j = 0; j < targets_.size(); ++j) {
    targets_[j] = step_target(targets_[j], cfg_.dt, cfg_.target, target_rng_[j], &cfg_.area);
  }

  // Sensing and local filtering.
  std::vector<std::vector<Measurement>> measurements(uavs_.size());
  rec.observed.assign(targets_.size(), 0);
  sense(t_now, measurements, rec.observed);
  for (std::size_t i = 0; i < uavs_.size(); ++i) {
    const int dropped = local_filter_step(nodes_[i].tracks, measurements[i], uavs_[i], cfg_.dt, k_, cfg_.filter, sensor_);
    if (dropped > 0) spdlog::debug("step {} uav {}: {} measurement updates dropped", k_, i, dropped);
  }

  // Fusion over the current topology.
  std::vector<Vec2> positions;
  for (const UavState& u : uavs_) positions.push_back(u.position());
  const CommGraph g = comm_graph(positions, cfg_.r_c);
  const std::vector<FusionOutput> fused =
      run_fusion(nodes_, g, geometry_, cfg_.L, t_now, cfg_.trace_messages ? &event_.messages : nullptr);
  for (const FusionOutput& f : fused) rec.fusion_rounds_max = std::max(rec.fusion_rounds_max, f.rounds);

  assign_and_command(g, fused, t_now, rec);

  // Metrics against ground truth.
  rec.t_imt_raw = uncovered_time(last_visit_, t_now);
  equiv_scratch_.assign(geometry_.size(), cfg_.t0);
  for (const FusionNode& node : nodes_) {
    const std::vector<double>& data = node.evtm.data();
    for (std::size_t c = 0; c < data.size(); ++c) equiv_scratch_[c] = std::max(equiv_scratch_[c], data[c]);
  }
  rec.t_imt_equiv = uncovered_time(equiv_scratch_, t_now);

  rec.rmse.assign(targets_.size(), 0.0);
  for (std::size_t j = 0; j < targets_.size(); ++j) {
    double sq = 0.0;
    int holders = 0;
    for (const FusionNode& node : nodes_) {
      const auto it = node.tracks.entries.find(targets_[j].id);
      if (it == node.tracks.entries.end()) continue;
      const StateVec& s = it->second.s_bar;
      const double ex = s(0) - targets_[j].x;
      const double ey = s(2) - targets_[j].y;
      sq += ex * ex + ey * ey;
      ++holders;
    }
    if (holders > 0) rec.rmse[j] = std::sqrt(sq / holders);
  }

  event_.uavs = uavs_;
  event_.targets = targets_;
  for (const FusionNode& node : nodes_) {
    for (const auto& [id, entry] : node.tracks.entries) event_.tracks.push_back({node.tracks.owner, entry.fused_report()});
  }
  return rec;
}

RunSummary run_scenario(const ScenarioConfig& cfg, const RunOptions& options, std::vector<MetricsRecord>* records) {
  validate(cfg);
  RunSummary summary;
  summary.coverage_rate.assign(static_cast<std::size_t>(cfg.target_count), 0.0);
  if (options.metrics != nullptr) write_metrics_header(*options.metrics, cfg.target_count, cfg.uav_count);

  Engine engine(cfg);
  const long window_start = cfg.steps >= steady_state_start(cfg) ? steady_state_start(cfg) : 1;
  double imt_sum = 0.0;
  double equiv_sum = 0.0;
  long window = 0;
  double rmse_sum = 0.0;
  long rmse_count = 0;
  double assign_sum = 0.0;
  std::vector<long> observed(summary.coverage_rate.size(), 0);

  for (long k = 1; k <= cfg.steps; ++k) {
    const MetricsRecord rec = engine.step();
    if (options.metrics != nullptr) write_metrics_row(*options.metrics, rec, options.timing);
    if (options.events != nullptr) *options.events << event_json(engine.last_event()).dump() << '\n';

    if (k >= window_start) {
      imt_sum += rec.t_imt_raw;
      equiv_sum += rec.t_imt_equiv;
      ++window;
    }
    for (std::size_t j = 0; j < rec.observed.size(); ++j) {
      observed[j] += rec.observed[j];
      if (rec.rmse[j] > 0.0) {
        rmse_sum += rec.rmse[j];
        ++rmse_count;
      }
    }
    assign_sum += rec.assign_ms;
    if (records != nullptr) records->push_back(rec);
  }

  summary.steps = cfg.steps;
  if (window > 0) {
    summary.mean_t_imt = imt_sum / static_cast<double>(window);
    summary.mean_t_imt_equiv = equiv_sum / static_cast<double>(window);
  }
  if (cfg.steps > 0) {
    for (std::size_t j = 0; j < observed.size(); ++j) {
      summary.coverage_rate[j] = static_cast<double>(observed[j]) / static_cast<double>(cfg.steps);
      summary.mean_coverage_rate += summary.coverage_rate[j];
    }
    if (!observed.empty()) summary.mean_coverage_rate /= static_cast<double>(observed.size());
    summary.mean_assign_ms = assign_sum / static_cast<double>(cfg.steps);
  }
  if (rmse_count > 0) summary.mean_rmse = rmse_sum / static_cast<double>(rmse_count);
  return summary;
}

}  // namespace swarm
