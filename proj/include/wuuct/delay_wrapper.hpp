#pragma once

#include <chrono>
#include <memory>

#include "wuuct/env.hpp"

namespace wuuct {

enum class DelayMode { kSleep, kSpin };

// Adds a fixed wall-clock cost to every step() of the inner environment.
// Outcomes are untouched. Sleep mode lets many workers overlap their delays
// even on a single core; spin mode burns CPU like a real simulator would.
class DelayWrapper final : public Environment {
 public:
  DelayWrapper(std::unique_ptr<Environment> inner, std::chrono::microseconds step_delay,
               DelayMode mode = DelayMode::kSleep);

  std::string name() const override { return inner_->name(); }
  std::uint32_t action_count() const override { return inner_->action_count(); }
  State initial_state() const override { return inner_->initial_state(); }
  bool is_terminal(const State& state) const override { return inner_->is_terminal(state); }
  StepOutcome step(const State& state, ActionId action) const override;
  std::vector<std::uint8_t> serialize(const State& state) const override {
    return inner_->serialize(state);
  }
  State deserialize(std::span<const std::uint8_t> bytes) const override {
    return inner_->deserialize(bytes);
  }
  std::unique_ptr<Environment> clone() const override;

  const Environment& inner() const { return *inner_; }
  std::chrono::microseconds step_delay() const { return delay_; }

 private:
  std::unique_ptr<Environment> inner_;
  std::chrono::microseconds delay_;
  DelayMode mode_;
};

}  // namespace wuuct
