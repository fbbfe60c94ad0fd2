#include "wuuct/task.hpp"

#include "wuuct/bytes.hpp"

namespace wuuct {

namespace {

enum : std::uint8_t { kExpansionKind = 1, kSimulationKind = 2, kFailureKind = 3 };

void put_state(ByteWriter& w, const Environment& env, const State& state) {
  const auto bytes = env.serialize(state);
  w.u32(static_cast<std::uint32_t>(bytes.size()));
  w.raw(bytes);
}

State get_state(ByteReader& r, const Environment& env) {
  const std::uint32_t n = r.u32();
  return env.deserialize(r.raw(n));
}

void check_version(ByteReader& r) {
  if (r.u8() != kWireVersion) throw SerializationError("unknown wire version");
}

}  // namespace

std::vector<std::uint8_t> encode_task(const Environment& env, const Task& task) {
  ByteWriter w;
  w.u8(kWireVersion);
  if (const auto* e = std::get_if<ExpansionTask>(&task.work)) {
    w.u8(kExpansionKind);
    w.u64(task.index);
    w.u32(e->parent.value);
    w.u32(e->action.value);
    put_state(w, env, e->state);
  } else {
    const auto& s = std::get<SimulationTask>(task.work);
    w.u8(kSimulationKind);
    w.u64(task.index);
    w.u32(s.node.value);
    w.u64(s.sub_seed);
    put_state(w, env, s.state);
  }
  return w.take();
}

Task decode_task(const Environment& env, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  check_version(r);
  const std::uint8_t kind = r.u8();
  Task task;
  task.index = r.u64();
  if (kind == kExpansionKind) {
    ExpansionTask e;
    e.parent = NodeId{r.u32()};
    e.action = ActionId{r.u32()};
    e.state = get_state(r, env);
    task.work = std::move(e);
  } else if (kind == kSimulationKind) {
    SimulationTask s;
    s.node = NodeId{r.u32()};
    s.sub_seed = r.u64();
    s.state = get_state(r, env);
    task.work = std::move(s);
  } else {
    throw SerializationError("unknown task kind");
  }
  r.expect_end();
  return task;
}

std::vector<std::uint8_t> encode_result(const Environment& env, const TaskResult& result) {
  ByteWriter w;
  w.u8(kWireVersion);
  if (const auto* e = std::get_if<ExpansionResult>(&result.payload)) {
    w.u8(kExpansionKind);
    w.u64(result.index);
    w.u32(e->parent.value);
    w.u32(e->action.value);
    w.f64(e->outcome.reward);
    w.u8(e->outcome.terminal ? 1 : 0);
    put_state(w, env, e->outcome.next_state);
  } else if (const auto* s = std::get_if<SimulationResult>(&result.payload)) {
    w.u8(kSimulationKind);
    w.u64(result.index);
    w.u32(s->node.value);
    w.f64(s->value);
  } else {
    const auto& f = std::get<TaskFailure>(result.payload);
    w.u8(kFailureKind);
    w.u64(result.index);
    w.u32(static_cast<std::uint32_t>(f.message.size()));
    w.raw({reinterpret_cast<const std::uint8_t*>(f.message.data()), f.message.size()});
  }
  return w.take();
}

TaskResult decode_result(const Environment& env, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  check_version(r);
  const std::uint8_t kind = r.u8();
  TaskResult result;
  result.index = r.u64();
  if (kind == kExpansionKind) {
    ExpansionResult e;
    e.parent = NodeId{r.u32()};
    e.action = ActionId{r.u32()};
    e.outcome.reward = r.f64();
    e.outcome.terminal = r.u8() != 0;
    e.outcome.next_state = get_state(r, env);
    result.payload = std::move(e);
  } else if (kind == kSimulationKind) {
    SimulationResult s;
    s.node = NodeId{r.u32()};
    s.value = r.f64();
    result.payload = s;
  } else if (kind == kFailureKind) {
    const std::uint32_t n = r.u32();
    const auto msg = r.raw(n);
    result.payload = TaskFailure{std::string(msg.begin(), msg.end())};
  } else {
    throw SerializationError("unknown result kind");
  }
  r.expect_end();
  return result;
}

}  // namespace wuuct
