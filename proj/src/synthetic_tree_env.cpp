#include "wuuct/synthetic_tree_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wuuct/bytes.hpp"

namespace wuuct {

SyntheticTreeEnv::SyntheticTreeEnv(std::uint32_t branching, std::uint32_t depth, std::uint64_t seed)
    : branching_(branching), depth_(depth), seed_(seed) {
  if (branching < 2) throw ConfigError("synthetic tree needs branching >= 2");
  if (depth < 1) throw ConfigError("synthetic tree needs depth >= 1");
}

State SyntheticTreeEnv::initial_state() const {
  auto s = std::make_unique<Snapshot>();
  s->path_hash = root_hash(seed_);
  return State(std::move(s));
}

bool SyntheticTreeEnv::is_terminal(const State& state) const {
  return state.as<Snapshot>().depth >= depth_;
}

StepOutcome SyntheticTreeEnv::step(const State& state, ActionId action) const {
  check_step(state, action);
  const auto& cur = state.as<Snapshot>();
  auto next = std::make_unique<Snapshot>();
  next->depth = cur.depth + 1;
  next->path_hash = child_hash(cur.path_hash, action);
  const bool terminal = next->depth >= depth_;
  const double reward = terminal ? leaf_value(next->path_hash) : 0.0;
  return StepOutcome{State(std::move(next)), reward, terminal};
}

// Payload: u32 depth, u64 path hash.
std::vector<std::uint8_t> SyntheticTreeEnv::serialize(const State& state) const {
  const auto& s = state.as<Snapshot>();
  ByteWriter w;
  w.u8(kStateFormatVersion);
  w.u32(s.depth);
  w.u64(s.path_hash);
  return w.take();
}

State SyntheticTreeEnv::deserialize(std::span<const std::uint8_t> bytes) const {
  ByteReader r(bytes);
  if (r.u8() != kStateFormatVersion) throw SerializationError("unknown state version");
  auto s = std::make_unique<Snapshot>();
  s->depth = r.u32();
  s->path_hash = r.u64();
  r.expect_end();
  if (s->depth > depth_) throw SerializationError("depth beyond tree");
  return State(std::move(s));
}

std::unique_ptr<Environment> SyntheticTreeEnv::clone() const {
  return std::make_unique<SyntheticTreeEnv>(*this);
}

namespace {

void check_enumerable(const SyntheticTreeEnv& env) {
  const double leaves = std::pow(static_cast<double>(env.branching()), env.depth());
  if (leaves > 1e6) throw SizeLimitExceeded("b^d exceeds 10^6; refusing exhaustive search");
}

double best_below(const SyntheticTreeEnv& env, std::uint32_t depth, std::uint64_t hash,
                  double gamma) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t a = 0; a < env.branching(); ++a) {
    const std::uint64_t h = SyntheticTreeEnv::child_hash(hash, ActionId{a});
    const double v = depth + 1 == env.depth()
                         ? SyntheticTreeEnv::leaf_value(h)
                         : gamma * best_below(env, depth + 1, h, gamma);
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

double optimal_return(const SyntheticTreeEnv& env, double gamma) {
  check_enumerable(env);
  return best_below(env, 0, SyntheticTreeEnv::root_hash(env.seed()), gamma);
}

ActionId optimal_first_action(const SyntheticTreeEnv& env, double gamma) {
  check_enumerable(env);
  const std::uint64_t root = SyntheticTreeEnv::root_hash(env.seed());
  ActionId best{0};
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::uint32_t a = 0; a < env.branching(); ++a) {
    const std::uint64_t h = SyntheticTreeEnv::child_hash(root, ActionId{a});
    const double v = env.depth() == 1 ? SyntheticTreeEnv::leaf_value(h)
                                      : gamma * best_below(env, 1, h, gamma);
    if (v > best_value) {
      best_value = v;
      best = ActionId{a};
    }
  }
  return best;
}

}  // namespace wuuct
