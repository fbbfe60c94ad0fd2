#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <typeinfo>
#include <vector>

#include "wuuct/errors.hpp"

namespace wuuct {

struct ActionId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(ActionId, ActionId) = default;
};

// Version byte leading every serialized state.
inline constexpr std::uint8_t kStateFormatVersion = 1;

// Environment-specific snapshot. Concrete environments derive from this and
// are the only code that looks inside.
class EnvState {
 public:
  virtual ~EnvState() = default;
  virtual std::unique_ptr<EnvState> duplicate() const = 0;
};

// Value-semantic handle to an EnvState. Copying duplicates the snapshot, so
// two State objects never alias.
class State {
 public:
  State() = default;
  explicit State(std::unique_ptr<EnvState> impl) : impl_(std::move(impl)) {}

  State(const State& other) : impl_(other.impl_ ? other.impl_->duplicate() : nullptr) {}
  State& operator=(const State& other) {
    if (this != &other) impl_ = other.impl_ ? other.impl_->duplicate() : nullptr;
    return *this;
  }
  State(State&&) noexcept = default;
  State& operator=(State&&) noexcept = default;

  bool empty() const { return impl_ == nullptr; }

  template <typename T>
  const T& as() const {
    const auto* p = dynamic_cast<const T*>(impl_.get());
    if (p == nullptr) throw ContractViolation("state belongs to a different environment");
    return *p;
  }

 private:
  std::unique_ptr<EnvState> impl_;
};

struct StepOutcome {
  State next_state;
  double reward = 0.0;
  bool terminal = false;
};

// Deterministic finite-action MDP over duplicable states. Implementations are
// stateless apart from their parameters; step() never mutates its input.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual std::uint32_t action_count() const = 0;
  virtual State initial_state() const = 0;
  virtual bool is_terminal(const State& state) const = 0;

  // Throws InvalidAction for out-of-range actions and ContractViolation when
  // `state` is terminal.
  virtual StepOutcome step(const State& state, ActionId action) const = 0;

  // Layout: version byte followed by the environment payload.
  virtual std::vector<std::uint8_t> serialize(const State& state) const = 0;
  virtual State deserialize(std::span<const std::uint8_t> bytes) const = 0;

  // Independent instance for use on another thread.
  virtual std::unique_ptr<Environment> clone() const = 0;

 protected:
  void check_step(const State& state, ActionId action) const;
};

// Best discounted return over every action sequence from `state` to
// termination, for any environment. Throws SizeLimitExceeded once more than
// `max_leaves` terminal sequences would be enumerated.
double exhaustive_return(const Environment& env, const State& state, double gamma,
                         std::uint64_t max_leaves = 1'000'000);

// SplitMix64 finalizer. All environment randomness derives from it so that
// boards and reward tables are identical on every platform.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Top 53 bits of a hash mapped to [0, 1).
constexpr double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace wuuct
