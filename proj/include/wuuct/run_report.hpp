#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wuuct/env.hpp"

namespace wuuct {

struct PhaseTimes {
  double selection = 0.0;
  double expansion = 0.0;
  double simulation = 0.0;
  double backprop = 0.0;
  double communication = 0.0;

  double total() const { return selection + expansion + simulation + backprop + communication; }
  PhaseTimes& operator+=(const PhaseTimes& o);
  friend bool operator==(const PhaseTimes&, const PhaseTimes&) = default;
};

struct Occupancy {
  double expansion = 0.0;
  double simulation = 0.0;
};

// Metrics of one planning call, or of a whole episode when produced by the
// benchmark driver (then `actions` lists every executed action and
// `episode_return` is the realised return).
struct RunReport {
  std::string planner;
  std::optional<ActionId> best_action;
  double episode_return = 0.0;  // planned value of best_action for a single call
  std::uint64_t rollouts = 0;
  std::uint64_t tasks_dispatched = 0;  // task indices handed to workers
  PhaseTimes phase_ms;
  Occupancy occupancy;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t max_root_unobserved = 0;
  std::vector<ActionId> actions;
  std::map<std::string, std::string> config;
};

// {best_action, return, rollouts, phase_ms: {...}, occupancy: {...}, seed,
//  config: {...}} plus planner, wall_ms, tasks, max_root_unobserved, actions.
nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);

}  // namespace wuuct
