#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <thread>
#include <vector>

#include "wuuct/policy.hpp"
#include "wuuct/queue.hpp"
#include "wuuct/task.hpp"

namespace wuuct {

// Steps the environment for each EXPANSION task until the task queue closes.
void expansion_worker_loop(Queue<Task>& tasks, Queue<TaskResult>& results, const Environment& env,
                           std::atomic<std::int64_t>* busy_ns = nullptr);

// Runs one rollout per SIMULATION task, seeded with the task's sub-seed.
void simulation_worker_loop(Queue<Task>& tasks, Queue<TaskResult>& results,
                            const Environment& env, const PolicyConfig& cfg,
                            std::atomic<std::int64_t>* busy_ns = nullptr);

// Fixed-size pool of worker threads sharing one task queue and one result
// queue. Each worker owns a private clone of the environment. Only the
// owning (master) thread calls submit/receive.
class WorkerPool {
 public:
  enum class Kind { kExpansion, kSimulation };

  WorkerPool(Kind kind, std::uint32_t size, const Environment& env, const PolicyConfig& cfg);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void submit(Task task);
  // Blocks for the next result. Throws TransportError if the pool shut down.
  TaskResult receive();

  std::uint32_t size() const { return static_cast<std::uint32_t>(threads_.size()); }
  std::uint32_t in_flight() const { return in_flight_; }
  std::chrono::nanoseconds busy_time() const { return std::chrono::nanoseconds(busy_ns_.load()); }

  void shutdown();

 private:
  InProcessQueue<Task> tasks_;
  InProcessQueue<TaskResult> results_;
  std::vector<std::unique_ptr<Environment>> envs_;
  PolicyConfig cfg_;
  std::vector<std::jthread> threads_;
  std::atomic<std::int64_t> busy_ns_{0};
  std::uint32_t in_flight_ = 0;
};

}  // namespace wuuct
