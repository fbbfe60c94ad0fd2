#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wuuct/run_report.hpp"
#include "wuuct/tree.hpp"

namespace wuuct {

// One statistics update applied by the master, in application order.
struct UpdateEvent {
  enum class Kind { kIncomplete, kComplete, kBackprop };
  Kind kind = Kind::kIncomplete;
  PathRecord path;
  double value = 0.0;                 // return folded in (complete/backprop)
  std::uint64_t root_unobserved = 0;  // O at the root right after the update
};

struct PlanResult {
  std::optional<ActionId> best_action;
  RunReport report;
  SearchTree tree;
  std::vector<UpdateEvent> events;  // filled when SearchSettings::record_events
};

// Replays recorded updates onto `tree` (whose statistics should be reset).
// Returns O at the root after each event.
std::vector<std::uint64_t> replay_events(SearchTree& tree, const std::vector<UpdateEvent>& events,
                                         double gamma);

// Zero V, N, O and shadow sums on every node, keeping topology.
void reset_statistics(SearchTree& tree);

}  // namespace wuuct
