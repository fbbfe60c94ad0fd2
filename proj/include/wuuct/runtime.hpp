#pragma once

#include <cstdint>
#include <vector>

#include "wuuct/env.hpp"
#include "wuuct/plan_result.hpp"
#include "wuuct/search_settings.hpp"

namespace wuuct {

enum class ParallelMode {
  kWuUct,  // incomplete/complete updates, selection by the O-corrected score
  kNaive,  // no O tracking; concurrent selections read stale statistics
};

// Master-worker planner: the master owns tree, state buffer, pending table and
// RNG; n_exp expansion workers step the environment and n_sim simulation
// workers run rollouts. Returns after exactly t_max completed rollouts.
PlanResult wu_uct_plan(const Environment& env, const State& root_state,
                       const SearchSettings& settings);

// Identical runtime with O tracking removed.
PlanResult naive_parallel_plan(const Environment& env, const State& root_state,
                               const SearchSettings& settings);

PlanResult parallel_plan(ParallelMode mode, const Environment& env, const State& root_state,
                         const SearchSettings& settings);

// Issues k selections back to back against frozen statistics, as the master
// would while k simulations are in flight and none has returned. In WU-UCT
// mode each selection is followed by its incomplete update. The tree's O
// counts are left as the selections leave them.
std::vector<PathRecord> concurrent_selections(SearchTree& tree, ParallelMode mode,
                                              const PolicyConfig& cfg, Rng& rng, std::size_t k);

}  // namespace wuuct
