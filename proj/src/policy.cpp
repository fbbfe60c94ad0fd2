#include "wuuct/policy.hpp"

#include <cmath>
#include <limits>

namespace wuuct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double exploration(double parent_count, double child_count, double beta) {
  return beta * std::sqrt(2.0 * std::log(parent_count) / child_count);
}

}  // namespace

void PolicyConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
  if (!(expand_stop_prob >= 0.0 && expand_stop_prob <= 1.0)) {
    throw ConfigError("expand_stop_prob must be in [0, 1]");
  }
  if (rollout_horizon && *rollout_horizon == 0) {
    throw ConfigError("rollout_horizon must be positive");
  }
  if (!(value_blend >= 0.0 && value_blend <= 1.0)) {
    throw ConfigError("value_blend must be in [0, 1]");
  }
}

double uct_score(const NodeStats& parent, const NodeStats& child, double beta) {
  if (child.visits == 0) return kInf;
  return child.value + exploration(static_cast<double>(parent.visits),
                                   static_cast<double>(child.visits), beta);
}

double wu_uct_score(const NodeStats& parent, const NodeStats& child, double beta) {
  const std::uint64_t child_count = child.visits + child.unobserved;
  if (child_count == 0) return kInf;
  return child.value + exploration(static_cast<double>(parent.visits + parent.unobserved),
                                   static_cast<double>(child_count), beta);
}

double treep_pseudocount_value(const NodeStats& stats, double r_vl, double n_vl) {
  const double n = static_cast<double>(stats.visits);
  const double denom = n + n_vl;
  if (denom == 0.0) throw DivisionByZero("N + n_VL is zero");
  // fma keeps the numerator correctly rounded when N*V and r_vl nearly cancel.
  return std::fma(n, stats.value, -r_vl) / denom;
}

double selection_score(ScoreMode mode, const NodeStats& parent, const NodeStats& child,
                       double beta) {
  switch (mode.kind) {
    case ScoreMode::Kind::kUct:
      return uct_score(parent, child, beta);
    case ScoreMode::Kind::kWuUct:
      return wu_uct_score(parent, child, beta);
    case ScoreMode::Kind::kVirtualLoss: {
      if (child.visits == 0) return kInf;
      const double k = static_cast<double>(child.unobserved);
      NodeStats adjusted = child;
      adjusted.value = child.value - k * mode.r_vl;
      return uct_score(parent, adjusted, beta);
    }
    case ScoreMode::Kind::kPseudoCount: {
      if (child.visits == 0) return kInf;
      const double k = static_cast<double>(child.unobserved);
      NodeStats adjusted = child;
      adjusted.value = treep_pseudocount_value(child, k * mode.r_vl, k * mode.n_vl);
      return uct_score(parent, adjusted, beta);
    }
  }
  return kInf;
}

Selection select_path(const SearchTree& tree, ScoreMode mode, const PolicyConfig& cfg, Rng& rng) {
  Selection sel;
  NodeId node = tree.root();
  sel.path.nodes.push_back(node);
  while (true) {
    const NodeStats& s = tree.stats(node);
    if (s.terminal) {
      sel.reason = StopReason::kTerminal;
      return sel;
    }
    if (s.depth > tree.limits().max_depth) {
      sel.reason = StopReason::kSimulate;
      return sel;
    }
    const auto kids = tree.children(node);
    const bool expandable = tree.can_expand(node);
    if (kids.empty()) {
      sel.reason = expandable ? StopReason::kExpand : StopReason::kSimulate;
      return sel;
    }
    if (expandable && uniform01(rng) < cfg.expand_stop_prob) {
      sel.reason = StopReason::kExpand;
      return sel;
    }
    NodeId best = kids.front().node;
    double best_score = -kInf;
    for (const Child& c : kids) {
      const double score = selection_score(mode, s, tree.stats(c.node), cfg.beta);
      if (score > best_score) {
        best_score = score;
        best = c.node;
      }
    }
    node = best;
    sel.path.nodes.push_back(node);
  }
}

ActionId choose_expansion_action(const SearchTree& tree, NodeId node, Rng& rng) {
  const auto options = tree.unexpanded_actions(node);
  if (options.empty()) throw ContractViolation("no unexpanded action left");
  return options[uniform_index(rng, options.size())];
}

double rollout(const Environment& env, const State& state, const PolicyConfig& cfg, Rng& rng) {
  if (env.is_terminal(state)) throw ContractViolation("rollout from a terminal state");
  const std::uint32_t actions = env.action_count();
  State cur = state;
  double ret = 0.0;
  double discount = 1.0;
  bool terminated = false;
  std::uint64_t steps = 0;
  while (!cfg.rollout_horizon || steps < *cfg.rollout_horizon) {
    const ActionId a{static_cast<std::uint32_t>(uniform_index(rng, actions))};
    StepOutcome out = env.step(cur, a);
    ret += discount * out.reward;
    discount *= cfg.gamma;
    ++steps;
    cur = std::move(out.next_state);
    if (out.terminal) {
      terminated = true;
      break;
    }
  }
  if (!cfg.value_estimator) return ret;
  if (!terminated) ret += discount * cfg.value_estimator(env, cur);
  return (1.0 - cfg.value_blend) * ret + cfg.value_blend * cfg.value_estimator(env, state);
}

}  // namespace wuuct
