#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wuuct/env.hpp"
#include "wuuct/tree.hpp"

namespace wuuct {

using Clock = std::chrono::steady_clock;

struct ExpansionTask {
  NodeId parent;
  State state;  // duplicate of the parent's state
  ActionId action;
};

struct SimulationTask {
  NodeId node;
  State state;
  std::uint64_t sub_seed = 0;
};

struct Task {
  std::uint64_t index = 0;  // task index tau
  std::variant<ExpansionTask, SimulationTask> work;
};

struct ExpansionResult {
  NodeId parent;
  ActionId action;
  StepOutcome outcome;
};

struct SimulationResult {
  NodeId node;
  double value = 0.0;  // cumulative return
};

struct TaskFailure {
  std::string message;
};

struct TaskResult {
  std::uint64_t index = 0;
  std::variant<ExpansionResult, SimulationResult, TaskFailure> payload;
  // Worker-side timing, not part of the wire format.
  Clock::time_point finished{};
  Clock::duration busy{};
};

// Wire format, little-endian:
//   task:   u8 version=1 | u8 kind (1 expansion, 2 simulation) | u64 tau |
//           u32 node | expansion: u32 action, simulation: u64 sub_seed |
//           u32 n | n bytes of serialized state
//   result: u8 version=1 | u8 kind (1 expansion, 2 simulation, 3 failure) |
//           u64 tau | expansion: u32 parent, u32 action, f64 reward,
//           u8 terminal, u32 n, n state bytes | simulation: u32 node,
//           f64 return | failure: u32 n, n bytes of UTF-8 message
inline constexpr std::uint8_t kWireVersion = 1;

std::vector<std::uint8_t> encode_task(const Environment& env, const Task& task);
Task decode_task(const Environment& env, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_result(const Environment& env, const TaskResult& result);
TaskResult decode_result(const Environment& env, std::span<const std::uint8_t> bytes);

}  // namespace wuuct
