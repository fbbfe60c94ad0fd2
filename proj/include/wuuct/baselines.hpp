#pragma once

#include <cstdint>

#include "wuuct/env.hpp"
#include "wuuct/plan_result.hpp"
#include "wuuct/search_settings.hpp"

namespace wuuct {

// Plain UCT: t_max strictly sequential rollouts with the same traversal-stop
// rule as the parallel master. Rollout k is seeded with task_seed(seed, k).
PlanResult sequential_uct_plan(const Environment& env, const State& root_state,
                               const SearchSettings& settings);

// Leaf parallelization: each iteration selects and expands one node, runs
// n_sim rollouts from it in parallel and backpropagates every return along
// the same path. The final batch is trimmed so exactly t_max rollouts run.
PlanResult leafp_plan(const Environment& env, const State& root_state,
                      const SearchSettings& settings);

// Tree parallelization: n_sim threads share one tree under a single lock.
// Each rollout applies a virtual loss r_vl along its path for as long as it
// is in flight; with treep.n_vl set, selection reads the pseudo-count value
// (N*V - r_vl) / (N + n_vl) instead. Stored values are never modified.
PlanResult treep_plan(const Environment& env, const State& root_state,
                      const SearchSettings& settings);

// Root parallelization: expands every root child (up to the width cap),
// gives each ceil(t_max / k) rollouts split across n_sim independent
// workers, then merges the workers' private trees.
PlanResult rootp_plan(const Environment& env, const State& root_state,
                      const SearchSettings& settings);

// ceil(t_max / children), the per-child rollout budget of root parallelization.
std::uint64_t rootp_child_budget(std::uint64_t t_max, std::uint32_t children);

// Visit-weighted merge of per-worker (N, V) pairs for one root child.
struct ChildAggregate {
  std::uint64_t visits = 0;
  double value = 0.0;
};
ChildAggregate merge_child_stats(const ChildAggregate& a, const ChildAggregate& b);

}  // namespace wuuct
