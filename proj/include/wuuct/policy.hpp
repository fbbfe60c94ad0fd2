#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "wuuct/env.hpp"
#include "wuuct/tree.hpp"

namespace wuuct {

using Rng = std::mt19937_64;

// Uniform in [0, 1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

// Per-task simulation seed.
inline std::uint64_t task_seed(std::uint64_t seed, std::uint64_t task) { return seed ^ task; }

using ValueEstimator = std::function<double(const Environment&, const State&)>;

struct PolicyConfig {
  double beta = 1.0;
  double gamma = 0.99;
  double expand_stop_prob = 0.5;
  std::optional<std::uint32_t> rollout_horizon;  // nullopt: run to termination
  double value_blend = 0.0;
  ValueEstimator value_estimator;  // empty: pure rollout
  std::uint64_t rng_seed = 0;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

// Which statistics the selection score reads.
struct ScoreMode {
  enum class Kind {
    kUct,          // V + beta*sqrt(2 ln N_p / N_c)
    kWuUct,        // counts include in-flight simulations O
    kVirtualLoss,  // V - O*r_vl in the UCT score
    kPseudoCount,  // (N*V - O*r_vl) / (N + O*n_vl) in the UCT score
  };

  Kind kind = Kind::kUct;
  double r_vl = 0.0;
  double n_vl = 0.0;

  static ScoreMode uct() { return {Kind::kUct}; }
  static ScoreMode wu_uct() { return {Kind::kWuUct}; }
  static ScoreMode virtual_loss(double r_vl) { return {Kind::kVirtualLoss, r_vl, 0.0}; }
  static ScoreMode pseudo_count(double r_vl, double n_vl) {
    return {Kind::kPseudoCount, r_vl, n_vl};
  }
};

double uct_score(const NodeStats& parent, const NodeStats& child, double beta);
double wu_uct_score(const NodeStats& parent, const NodeStats& child, double beta);

// V' = (N*V - r_vl) / (N + n_vl). Throws DivisionByZero when N + n_vl == 0.
double treep_pseudocount_value(const NodeStats& stats, double r_vl, double n_vl);

// Score of `child` under `mode`. In the TreeP modes the child's O counts the
// virtual losses currently applied to it.
double selection_score(ScoreMode mode, const NodeStats& parent, const NodeStats& child,
                       double beta);

enum class StopReason {
  kExpand,    // expand one unexpanded action of the last node
  kSimulate,  // simulate from the last node as-is
  kTerminal,  // last node is terminal; its rollout return is 0
};

struct Selection {
  PathRecord path;
  StopReason reason = StopReason::kExpand;
};

// Descend from the root by argmax score (lowest action on ties) until the node
// is terminal, deeper than max_depth, childless, or expandable and a
// Bernoulli(expand_stop_prob) draw fires. The draw is only taken at nodes
// that have at least one child and can still expand. A childless node whose
// actions are all claimed by pending expansions is simulated instead.
Selection select_path(const SearchTree& tree, ScoreMode mode, const PolicyConfig& cfg, Rng& rng);

// Uniform draw among the node's unexpanded actions.
ActionId choose_expansion_action(const SearchTree& tree, NodeId node, Rng& rng);

// Uniform-random default policy from a non-terminal state. Returns the
// discounted return, bootstrapped and blended when a value estimator is set.
double rollout(const Environment& env, const State& state, const PolicyConfig& cfg, Rng& rng);

}  // namespace wuuct
