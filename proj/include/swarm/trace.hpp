#pragma once

// Trace formats: metrics CSV rows, JSON-lines step events, fusion message
// serialization and an offline checker for assignment constraints.

#include "swarm/engine.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace swarm {

/// step,t_imt_raw,t_imt_equiv,observed_0,rmse_0,...,task_0,...,assign_ms,fusion_rounds_max
void write_metrics_header(std::ostream& os, int num_targets, int num_uavs);

/// assign_ms is left empty unless `timing` is set, keeping the file a pure
/// function of config and seed.
void write_metrics_row(std::ostream& os, const MetricsRecord& rec, bool timing);

nlohmann::json event_json(const StepEvent& ev);

nlohmann::json message_json(const FusionMessage& msg);
FusionMessage message_from_json(const nlohmann::json& j);

struct TraceCheck {
  long steps = 0;
  long components = 0;
  long violations = 0;
  std::vector<std::string> details;  // first few violations
};

/// Re-verifies every component record of an events stream: known regime,
/// at most one task per UAV and per-target tracker counts inside the
/// regime's [lower, cap] bounds.
TraceCheck check_trace(std::istream& events);

}  // namespace swarm
