#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wuuct/env.hpp"

namespace testing {

using namespace wuuct;

// Every action advances the same counter; the last step pays 1. Length 0
// starts terminal.
class ChainEnv final : public Environment {
 public:
  struct Snapshot final : EnvState {
    std::uint32_t depth = 0;
    std::unique_ptr<EnvState> duplicate() const override { return std::make_unique<Snapshot>(*this); }
  };

  explicit ChainEnv(std::uint32_t length) : length_(length) {}
  std::string name() const override { return "chain"; }
  std::uint32_t action_count() const override { return 2; }
  State initial_state() const override { return State(std::make_unique<Snapshot>()); }
  bool is_terminal(const State& s) const override { return s.as<Snapshot>().depth >= length_; }
  StepOutcome step(const State& s, ActionId a) const override {
    check_step(s, a);
    auto next = std::make_unique<Snapshot>(s.as<Snapshot>());
    next->depth += 1;
    const bool done = next->depth >= length_;
    return {State(std::move(next)), done ? 1.0 : 0.0, done};
  }
  std::vector<std::uint8_t> serialize(const State& s) const override {
    return {kStateFormatVersion, static_cast<std::uint8_t>(s.as<Snapshot>().depth)};
  }
  State deserialize(std::span<const std::uint8_t> b) const override {
    auto snap = std::make_unique<Snapshot>();
    snap->depth = b[1];
    return State(std::move(snap));
  }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<ChainEnv>(length_); }

 private:
  std::uint32_t length_;
};

}  // namespace testing
