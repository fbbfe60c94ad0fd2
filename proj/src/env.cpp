#include "wuuct/env.hpp"

#include <algorithm>
#include <limits>

namespace wuuct {

void Environment::check_step(const State& state, ActionId action) const {
  if (action.value >= action_count()) {
    throw InvalidAction("action " + std::to_string(action.value) + " out of range [0, " +
                        std::to_string(action_count()) + ")");
  }
  if (is_terminal(state)) throw ContractViolation("step() called on a terminal state");
}

namespace {

double best_from(const Environment& env, const State& state, double gamma, std::uint64_t& budget) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t a = 0; a < env.action_count(); ++a) {
    StepOutcome out = env.step(state, ActionId{a});
    double v = out.reward;
    if (out.terminal) {
      if (budget == 0) throw SizeLimitExceeded("too many action sequences for exhaustive search");
      --budget;
    } else {
      v += gamma * best_from(env, out.next_state, gamma, budget);
    }
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

double exhaustive_return(const Environment& env, const State& state, double gamma,
                         std::uint64_t max_leaves) {
  if (env.is_terminal(state)) return 0.0;
  return best_from(env, state, gamma, max_leaves);
}

}  // namespace wuuct
