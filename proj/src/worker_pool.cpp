#include "wuuct/worker_pool.hpp"

#include <exception>

namespace wuuct {

namespace {

template <typename Handler>
void serve(Queue<Task>& tasks, Queue<TaskResult>& results, std::atomic<std::int64_t>* busy_ns,
           Handler&& handle) {
  while (auto task = tasks.pop()) {
    const auto start = Clock::now();
    TaskResult result;
    result.index = task->index;
    try {
      result.payload = handle(*task);
    } catch (const std::exception& e) {
      result.payload = TaskFailure{e.what()};
    }
    result.finished = Clock::now();
    result.busy = result.finished - start;
    if (busy_ns != nullptr) {
      busy_ns->fetch_add(std::chrono::duration_cast<std::chrono::nanoseconds>(result.busy).count());
    }
    if (!results.push(std::move(result))) return;
  }
}

}  // namespace

void expansion_worker_loop(Queue<Task>& tasks, Queue<TaskResult>& results, const Environment& env,
                           std::atomic<std::int64_t>* busy_ns) {
  serve(tasks, results, busy_ns,
        [&](Task& task) -> std::variant<ExpansionResult, SimulationResult, TaskFailure> {
          auto* e = std::get_if<ExpansionTask>(&task.work);
          if (e == nullptr) return TaskFailure{"expansion worker received a simulation task"};
          return ExpansionResult{e->parent, e->action, env.step(e->state, e->action)};
        });
}

void simulation_worker_loop(Queue<Task>& tasks, Queue<TaskResult>& results,
                            const Environment& env, const PolicyConfig& cfg,
                            std::atomic<std::int64_t>* busy_ns) {
  serve(tasks, results, busy_ns,
        [&](Task& task) -> std::variant<ExpansionResult, SimulationResult, TaskFailure> {
          auto* s = std::get_if<SimulationTask>(&task.work);
          if (s == nullptr) return TaskFailure{"simulation worker received an expansion task"};
          if (env.is_terminal(s->state)) return TaskFailure{"simulation task on a terminal state"};
          Rng rng(s->sub_seed);
          return SimulationResult{s->node, rollout(env, s->state, cfg, rng)};
        });
}

WorkerPool::WorkerPool(Kind kind, std::uint32_t size, const Environment& env,
                       const PolicyConfig& cfg)
    : cfg_(cfg) {
  if (size == 0) throw ConfigError("worker pool needs at least one worker");
  envs_.reserve(size);
  for (std::uint32_t i = 0; i < size; ++i) envs_.push_back(env.clone());
  threads_.reserve(size);
  for (std::uint32_t i = 0; i < size; ++i) {
    const Environment& worker_env = *envs_[i];
    if (kind == Kind::kExpansion) {
      threads_.emplace_back([this, &worker_env] {
        expansion_worker_loop(tasks_, results_, worker_env, &busy_ns_);
      });
    } else {
      threads_.emplace_back([this, &worker_env] {
        simulation_worker_loop(tasks_, results_, worker_env, cfg_, &busy_ns_);
      });
    }
  }
}

WorkerPool::~WorkerPool() { shutdown(); }

void WorkerPool::submit(Task task) {
  if (!tasks_.push(std::move(task))) throw TransportError("worker pool is shut down");
  ++in_flight_;
}

TaskResult WorkerPool::receive() {
  if (in_flight_ == 0) throw ContractViolation("receive() with no task in flight");
  auto result = results_.pop();
  if (!result) throw TransportError("result queue closed");
  --in_flight_;
  return std::move(*result);
}

void WorkerPool::shutdown() {
  tasks_.close();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  results_.close();
}

}  // namespace wuuct
