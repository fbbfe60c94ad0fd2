#include "wuuct/run_report.hpp"

namespace wuuct {

PhaseTimes& PhaseTimes::operator+=(const PhaseTimes& o) {
  selection += o.selection;
  expansion += o.expansion;
  simulation += o.simulation;
  backprop += o.backprop;
  communication += o.communication;
  return *this;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["planner"] = r.planner;
  j["best_action"] = r.best_action ? nlohmann::json(r.best_action->value) : nlohmann::json(nullptr);
  j["return"] = r.episode_return;
  j["rollouts"] = r.rollouts;
  j["tasks"] = r.tasks_dispatched;
  j["phase_ms"] = {{"selection", r.phase_ms.selection},
                   {"expansion", r.phase_ms.expansion},
                   {"simulation", r.phase_ms.simulation},
                   {"backprop", r.phase_ms.backprop},
                   {"communication", r.phase_ms.communication}};
  j["occupancy"] = {{"expansion", r.occupancy.expansion}, {"simulation", r.occupancy.simulation}};
  j["wall_ms"] = r.wall_ms;
  j["seed"] = r.seed;
  j["max_root_unobserved"] = r.max_root_unobserved;
  auto actions = nlohmann::json::array();
  for (ActionId a : r.actions) actions.push_back(a.value);
  j["actions"] = std::move(actions);
  j["config"] = r.config;
  return j;
}

RunReport run_report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.planner = j.value("planner", "");
  if (!j.at("best_action").is_null()) r.best_action = ActionId{j.at("best_action").get<std::uint32_t>()};
  r.episode_return = j.at("return").get<double>();
  r.rollouts = j.at("rollouts").get<std::uint64_t>();
  r.tasks_dispatched = j.value("tasks", std::uint64_t{0});
  const auto& p = j.at("phase_ms");
  r.phase_ms = {p.at("selection").get<double>(), p.at("expansion").get<double>(),
                p.at("simulation").get<double>(), p.at("backprop").get<double>(),
                p.at("communication").get<double>()};
  const auto& o = j.at("occupancy");
  r.occupancy = {o.at("expansion").get<double>(), o.at("simulation").get<double>()};
  r.wall_ms = j.value("wall_ms", 0.0);
  r.seed = j.at("seed").get<std::uint64_t>();
  r.max_root_unobserved = j.value("max_root_unobserved", std::uint64_t{0});
  if (j.contains("actions")) {
    for (const auto& a : j.at("actions")) r.actions.push_back(ActionId{a.get<std::uint32_t>()});
  }
  if (j.contains("config")) r.config = j.at("config").get<std::map<std::string, std::string>>();
  return r;
}

}  // namespace wuuct
