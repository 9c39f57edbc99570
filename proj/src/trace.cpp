#include "swarm/trace.hpp"

#include <fmt/format.h>

#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace swarm {

using nlohmann::json;

void write_metrics_header(std::ostream& os, int num_targets, int num_uavs) {
  os << "step,t_imt_raw,t_imt_equiv";
  for (int j = 0; j < num_targets; ++j) os << ",observed_" << j << ",rmse_" << j;
  for (int i = 0; i < num_uavs; ++i) os << ",task_" << i;
  os << ",assign_ms,fusion_rounds_max\n";
}

void write_metrics_row(std::ostream& os, const MetricsRecord& rec, bool timing) {
  std::string line = fmt::format("{},{},{}", rec.step, rec.t_imt_raw, rec.t_imt_equiv);
  for (std::size_t j = 0; j < rec.observed.size(); ++j) line += fmt::format(",{},{}", rec.observed[j], rec.rmse[j]);
  for (int task : rec.task) line += fmt::format(",{}", task);
  line += timing ? fmt::format(",{:.4f}", rec.assign_ms) : std::string(",");
  line += fmt::format(",{}\n", rec.fusion_rounds_max);
  os << line;
  os.flush();
}

namespace {

json uav_json(const UavState& u) { return {{"id", u.id}, {"x", u.x}, {"y", u.y}, {"v", u.v}, {"eta", u.eta}, {"h", u.h}}; }

UavState uav_from_json(const json& j) {
  UavState u;
  u.id = j.at("id").get<int>();
  u.x = j.at("x").get<double>();
  u.y = j.at("y").get<double>();
  u.v = j.at("v").get<double>();
  u.eta = j.at("eta").get<double>();
  u.h = j.at("h").get<double>();
  return u;
}

json report_json(const TrackReport& r) {
  json s = json::array();
  for (int k = 0; k < 4; ++k) s.push_back(r.s(k));
  json P = json::array();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) P.push_back(r.P(a, b));
  }
  return {{"target", r.target_id}, {"s", s}, {"P", P}, {"rho", r.rho}, {"origin", r.origin},
          {"last_update", r.last_update}};
}

TrackReport report_from_json(const json& j) {
  TrackReport r;
  r.target_id = j.at("target").get<int>();
  const auto& s = j.at("s");
  const auto& P = j.at("P");
  if (s.size() != 4 || P.size() != 16) throw std::invalid_argument("track report has wrong dimensions");
  for (int k = 0; k < 4; ++k) r.s(k) = s.at(static_cast<std::size_t>(k)).get<double>();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) r.P(a, b) = P.at(static_cast<std::size_t>(a * 4 + b)).get<double>();
  }
  r.rho = j.at("rho").get<double>();
  r.origin = j.at("origin").get<int>();
  r.last_update = j.at("last_update").get<long>();
  return r;
}

}  // namespace

json message_json(const FusionMessage& msg) {
  json tracks = json::array();
  for (const TrackReport& r : msg.tracks) tracks.push_back(report_json(r));
  return {{"sender", msg.sender},
          {"uav", uav_json(msg.uav_state)},
          {"map", {{"L", msg.local_map.L}, {"anchor", {msg.local_map.anchor.m, msg.local_map.anchor.n}}, {"t", msg.local_map.t}}},
          {"tracks", tracks}};
}

FusionMessage message_from_json(const json& j) {
  FusionMessage msg;
  msg.sender = j.at("sender").get<int>();
  msg.uav_state = uav_from_json(j.at("uav"));
  const json& map = j.at("map");
  msg.local_map.L = map.at("L").get<int>();
  msg.local_map.anchor = {map.at("anchor").at(0).get<int>(), map.at("anchor").at(1).get<int>()};
  msg.local_map.t = map.at("t").get<std::vector<double>>();
  if (msg.local_map.t.size() != static_cast<std::size_t>(msg.local_map.L * msg.local_map.L)) {
    throw std::invalid_argument("local map size does not match L");
  }
  for (const json& r : j.at("tracks")) msg.tracks.push_back(report_from_json(r));
  return msg;
}

json event_json(const StepEvent& ev) {
  json uavs = json::array();
  for (const UavState& u : ev.uavs) uavs.push_back(uav_json(u));
  json targets = json::array();
  for (const TargetTruth& t : ev.targets) {
    targets.push_back({{"id", t.id}, {"x", t.x}, {"y", t.y}, {"xdot", t.xdot}, {"ydot", t.ydot}});
  }
  json comps = json::array();
  for (const ComponentEvent& c : ev.components) {
    comps.push_back({{"members", c.members},
                     {"targets", c.targets},
                     {"caps", c.caps},
                     {"regime", regime_name(c.regime)},
                     {"task", c.task},
                     {"fallback", c.fallback}});
  }
  json tracks = json::array();
  for (const HeldTrack& h : ev.tracks) {
    tracks.push_back({{"uav", h.uav},
                      {"target", h.report.target_id},
                      {"x", h.report.s(0)},
                      {"y", h.report.s(2)},
                      {"rho", h.report.rho},
                      {"origin", h.report.origin}});
  }
  json out = {{"step", ev.step}, {"t", ev.t}, {"uavs", uavs}, {"targets", targets}, {"components", comps},
              {"tracks", tracks}};
  if (!ev.messages.empty()) {
    json msgs = json::array();
    for (const FusionMessage& m : ev.messages) msgs.push_back(message_json(m));
    out["messages"] = msgs;
  }
  return out;
}

TraceCheck check_trace(std::istream& events) {
  TraceCheck out;
  auto violation = [&](std::string what) {
    ++out.violations;
    if (out.details.size() < 10) out.details.push_back(std::move(what));
  };
  std::string line;
  while (std::getline(events, line)) {
    if (line.empty()) continue;
    const json ev = json::parse(line);
    const long step = ev.at("step").get<long>();
    ++out.steps;
    std::set<int> seen_uavs;
    for (const json& c : ev.at("components")) {
      ++out.components;
      const auto members = c.at("members").get<std::vector<int>>();
      const auto targets = c.at("targets").get<std::vector<int>>();
      const auto caps = c.at("caps").get<std::vector<int>>();
      const auto task = c.at("task").get<std::vector<int>>();
      if (members.size() != task.size() || targets.size() != caps.size()) {
        violation(fmt::format("step {}: malformed component record", step));
        continue;
      }
      for (int m : members) {
        if (!seen_uavs.insert(m).second) violation(fmt::format("step {}: UAV {} listed in two components", step, m));
      }
      if (c.at("fallback").get<bool>()) {
        violation(fmt::format("step {}: assignment fell back to coverage", step));
        continue;
      }
      int cap_sum = 0;
      for (int cap : caps) cap_sum += cap;
      const Regime regime = classify_regime(static_cast<int>(members.size()), static_cast<int>(targets.size()), cap_sum);
      if (c.at("regime").get<std::string>() != regime_name(regime)) {
        violation(fmt::format("step {}: logged regime differs from {}", step, regime_name(regime)));
      }
      std::map<int, int> count;
      for (int t : task) {
        if (t == kCoverageTask) continue;
        if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
          violation(fmt::format("step {}: task {} is not a known target", step, t));
          continue;
        }
        ++count[t];
      }
      const Bounds uav_bounds = source_arc_bounds(regime);
      for (std::size_t k = 0; k < members.size(); ++k) {
        const int assigned = task[k] == kCoverageTask ? 0 : 1;
        if (assigned < uav_bounds.lower) violation(fmt::format("step {}: UAV {} idle in regime {}", step, members[k], regime_name(regime)));
      }
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const Bounds b = sink_arc_bounds(regime, caps[j]);
        const int n = count[targets[j]];
        if (n < b.lower || n > b.upper) {
          violation(fmt::format("step {}: target {} has {} trackers, bounds [{}, {}]", step, targets[j], n, b.lower, b.upper));
        }
      }
    }
  }
  return out;
}

}  // namespace swarm
