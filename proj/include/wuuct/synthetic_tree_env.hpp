#pragma once

#include <cstdint>

#include "wuuct/env.hpp"

namespace wuuct {

// Uniform b-ary tree of depth d. Every transition is reward-free except the
// last, which pays a leaf value in [0, 1) drawn from a seeded hash of the
// root-to-leaf action string.
class SyntheticTreeEnv final : public Environment {
 public:
  struct Snapshot final : EnvState {
    std::uint32_t depth = 0;
    std::uint64_t path_hash = 0;

    std::unique_ptr<EnvState> duplicate() const override {
      return std::make_unique<Snapshot>(*this);
    }
  };

  SyntheticTreeEnv(std::uint32_t branching, std::uint32_t depth, std::uint64_t seed);

  std::string name() const override { return "synthetic-tree"; }
  std::uint32_t action_count() const override { return branching_; }
  State initial_state() const override;
  bool is_terminal(const State& state) const override;
  StepOutcome step(const State& state, ActionId action) const override;
  std::vector<std::uint8_t> serialize(const State& state) const override;
  State deserialize(std::span<const std::uint8_t> bytes) const override;
  std::unique_ptr<Environment> clone() const override;

  std::uint32_t branching() const { return branching_; }
  std::uint32_t depth() const { return depth_; }
  std::uint64_t seed() const { return seed_; }

  static std::uint64_t root_hash(std::uint64_t seed) { return mix64(seed); }
  static std::uint64_t child_hash(std::uint64_t parent, ActionId action) {
    return mix64(parent ^ ((static_cast<std::uint64_t>(action.value) + 1) * 0xd1342543de82ef95ULL));
  }
  static double leaf_value(std::uint64_t leaf_hash) { return hash_to_unit(mix64(leaf_hash)); }

 private:
  std::uint32_t branching_;
  std::uint32_t depth_;
  std::uint64_t seed_;
};

// Exact maximum discounted return over all b^d action sequences from the
// root. Throws SizeLimitExceeded when b^d > 10^6.
double optimal_return(const SyntheticTreeEnv& env, double gamma);

// First action of an optimal sequence (lowest index on ties).
ActionId optimal_first_action(const SyntheticTreeEnv& env, double gamma);

}  // namespace wuuct
