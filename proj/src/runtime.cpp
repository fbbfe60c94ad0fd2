#include "wuuct/runtime.hpp"

#include <algorithm>
#include <unordered_map>

#include "wuuct/state_buffer.hpp"
#include "wuuct/worker_pool.hpp"

namespace wuuct {

namespace {

double to_ms(Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink_ms) : sink_(sink_ms), start_(Clock::now()) {}
  ~ScopedTimer() { sink_ += to_ms(Clock::now() - start_); }

 private:
  double& sink_;
  Clock::time_point start_;
};

std::map<std::string, std::string> echo_settings(const SearchSettings& s) {
  return {{"t_max", std::to_string(s.t_max)},
          {"d_max", std::to_string(s.limits.max_depth)},
          {"max_children", std::to_string(s.limits.max_children)},
          {"beta", std::to_string(s.policy.beta)},
          {"gamma", std::to_string(s.policy.gamma)},
          {"expand_stop_prob", std::to_string(s.policy.expand_stop_prob)},
          {"n_exp", std::to_string(s.n_exp)},
          {"n_sim", std::to_string(s.n_sim)},
          {"serialize", s.serialize ? "true" : "false"}};
}

// The master process. Single-threaded owner of every statistic.
class Master {
 public:
  Master(ParallelMode mode, const Environment& env, const State& root_state,
         const SearchSettings& settings)
      : mode_(mode),
        env_(env),
        settings_(settings),
        tree_(env.action_count(), settings.limits, RootInfo{0, 0.0, env.is_terminal(root_state)}),
        rng_(settings.policy.rng_seed) {
    states_.put(tree_.root(), root_state);
  }

  PlanResult run() {
    const auto start = Clock::now();
    if (tree_.stats(tree_.root()).terminal) {
      // Every rollout takes the terminal shortcut; no worker is needed.
      while (completed_ < settings_.t_max) {
        PathRecord path{{tree_.root()}, next_task_++};
        ++selected_;
        finish_terminal(path);
      }
      return finish(start, nullptr, nullptr);
    }

    WorkerPool exp_pool(WorkerPool::Kind::kExpansion, settings_.n_exp, env_, settings_.policy);
    WorkerPool sim_pool(WorkerPool::Kind::kSimulation, settings_.n_sim, env_, settings_.policy);
    exp_ = &exp_pool;
    sim_ = &sim_pool;
    const std::uint32_t exp_cap = settings_.serialize ? 1 : settings_.n_exp;
    const std::uint32_t sim_cap = settings_.serialize ? 1 : settings_.n_sim;

    while (completed_ < settings_.t_max) {
      const bool exp_full = exp_pool.in_flight() >= exp_cap;
      const bool sim_full = sim_pool.in_flight() >= sim_cap;
      const bool has_capacity = settings_.serialize
                                    ? exp_pool.in_flight() + sim_pool.in_flight() == 0
                                    : !exp_full && !sim_full;
      if (selected_ < settings_.t_max && has_capacity) {
        select_and_dispatch();
      } else if (exp_full && exp_pool.in_flight() > 0) {
        handle_expansion(receive(exp_pool, phase_.expansion));
      } else if (sim_full && sim_pool.in_flight() > 0) {
        handle_simulation(receive(sim_pool, phase_.simulation));
      } else if (exp_pool.in_flight() > 0 && sim_pool.in_flight() == 0) {
        handle_expansion(receive(exp_pool, phase_.expansion));
      } else if (sim_pool.in_flight() > 0) {
        handle_simulation(receive(sim_pool, phase_.simulation));
      } else if (exp_pool.in_flight() > 0) {
        handle_expansion(receive(exp_pool, phase_.expansion));
      } else {
        throw InvariantViolation("rollouts missing with nothing in flight");
      }
    }
    PlanResult result = finish(start, &exp_pool, &sim_pool);
    exp_ = nullptr;
    sim_ = nullptr;
    return result;
  }

 private:
  struct Pending {
    PathRecord path;
    Clock::time_point dispatched;
  };

  ScoreMode score_mode() const {
    return mode_ == ParallelMode::kWuUct ? ScoreMode::wu_uct() : ScoreMode::uct();
  }

  void select_and_dispatch() {
    Selection sel;
    ActionId action{};
    {
      ScopedTimer t(phase_.selection);
      sel = select_path(tree_, score_mode(), settings_.policy, rng_);
      if (sel.reason == StopReason::kExpand) {
        action = choose_expansion_action(tree_, sel.path.nodes.back(), rng_);
        tree_.claim_action(sel.path.nodes.back(), action);
      }
    }
    sel.path.task = next_task_++;
    ++selected_;
    if (sel.reason != StopReason::kTerminal) ++worker_tasks_;
    const NodeId node = sel.path.nodes.back();
    switch (sel.reason) {
      case StopReason::kTerminal:
        finish_terminal(sel.path);
        break;
      case StopReason::kExpand:
        exp_->submit(Task{sel.path.task, ExpansionTask{node, states_.duplicate(node), action}});
        pending_.emplace(sel.path.task, Pending{std::move(sel.path), Clock::now()});
        break;
      case StopReason::kSimulate:
        dispatch_simulation(std::move(sel.path));
        break;
    }
  }

  void dispatch_simulation(PathRecord path) {
    const NodeId node = path.nodes.back();
    sim_->submit(Task{path.task, SimulationTask{node, states_.duplicate(node),
                                                task_seed(settings_.policy.rng_seed, path.task)}});
    {
      ScopedTimer t(phase_.backprop);
      observe_dispatch(path);
    }
    const std::uint64_t task = path.task;
    pending_.insert_or_assign(task, Pending{std::move(path), Clock::now()});
  }

  // Terminal shortcut: the rollout return is 0.
  void finish_terminal(const PathRecord& path) {
    ScopedTimer t(phase_.backprop);
    observe_dispatch(path);
    observe_return(path, 0.0);
    ++completed_;
  }

  void observe_dispatch(const PathRecord& path) {
    if (mode_ != ParallelMode::kWuUct) return;
    incomplete_update(tree_, path);
    const std::uint64_t root_o = tree_.stats(tree_.root()).unobserved;
    max_root_unobserved_ = std::max(max_root_unobserved_, root_o);
    log(UpdateEvent::Kind::kIncomplete, path, 0.0);
  }

  void observe_return(const PathRecord& path, double value) {
    if (mode_ == ParallelMode::kWuUct) {
      complete_update(tree_, path, value, settings_.policy.gamma);
      log(UpdateEvent::Kind::kComplete, path, value);
    } else {
      backpropagate(tree_, path, value, settings_.policy.gamma);
      log(UpdateEvent::Kind::kBackprop, path, value);
    }
  }

  void log(UpdateEvent::Kind kind, const PathRecord& path, double value) {
    if (!settings_.record_events) return;
    events_.push_back(UpdateEvent{kind, path, value, tree_.stats(tree_.root()).unobserved});
  }

  Pending take_pending(std::uint64_t task) {
    auto it = pending_.find(task);
    if (it == pending_.end()) {
      throw InvariantViolation("result for unknown task " + std::to_string(task));
    }
    Pending p = std::move(it->second);
    pending_.erase(it);
    return p;
  }

  // Blocking receive. The wait is charged to `phase_ms`, except the part
  // between the worker finishing and the master waking up, which is
  // communication.
  TaskResult receive(WorkerPool& pool, double& phase_ms) {
    const auto wait_start = Clock::now();
    TaskResult r = pool.receive();
    const auto received = Clock::now();
    const auto waited = received - wait_start;
    const auto transit = std::clamp(received - r.finished, Clock::duration::zero(), waited);
    phase_.communication += to_ms(transit);
    phase_ms += to_ms(waited - transit);
    return r;
  }

  static void raise_failure(const TaskResult& r) {
    if (const auto* f = std::get_if<TaskFailure>(&r.payload)) {
      throw TransportError("task " + std::to_string(r.index) + " failed: " + f->message);
    }
  }

  void handle_expansion(TaskResult r) {
    raise_failure(r);
    auto& e = std::get<ExpansionResult>(r.payload);
    Pending p = take_pending(r.index);
    NodeId child{};
    {
      ScopedTimer t(phase_.backprop);
      child = tree_.expand_attach(e.parent, e.action, e.outcome.reward, e.outcome.terminal);
      states_.put(child, std::move(e.outcome.next_state));
    }
    p.path.nodes.push_back(child);
    if (e.outcome.terminal) {
      finish_terminal(p.path);
    } else {
      dispatch_simulation(std::move(p.path));
    }
  }

  void handle_simulation(TaskResult r) {
    raise_failure(r);
    const auto& s = std::get<SimulationResult>(r.payload);
    Pending p = take_pending(r.index);
    ScopedTimer t(phase_.backprop);
    observe_return(p.path, s.value);
    ++completed_;
  }

  PlanResult finish(Clock::time_point start, const WorkerPool* exp_pool, const WorkerPool* sim_pool) {
    if (!pending_.empty()) throw InvariantViolation("tasks still pending at run end");
    const double wall = to_ms(Clock::now() - start);
    RunReport report;
    report.planner = mode_ == ParallelMode::kWuUct ? "wu-uct" : "naive";
    report.best_action = best_root_action(tree_);
    if (report.best_action) {
      report.episode_return = tree_.stats(*tree_.child(tree_.root(), *report.best_action)).value;
    }
    report.rollouts = completed_;
    report.tasks_dispatched = worker_tasks_;
    report.phase_ms = phase_;
    report.wall_ms = wall;
    report.seed = settings_.policy.rng_seed;
    report.max_root_unobserved = max_root_unobserved_;
    if (exp_pool != nullptr && wall > 0.0) {
      report.occupancy.expansion = to_ms(exp_pool->busy_time()) / (wall * exp_pool->size());
      report.occupancy.simulation = to_ms(sim_pool->busy_time()) / (wall * sim_pool->size());
    }
    report.config = echo_settings(settings_);
    const auto best = report.best_action;
    return PlanResult{best, std::move(report), std::move(tree_), std::move(events_)};
  }

  ParallelMode mode_;
  const Environment& env_;
  SearchSettings settings_;
  SearchTree tree_;
  StateBuffer states_;
  Rng rng_;
  WorkerPool* exp_ = nullptr;
  WorkerPool* sim_ = nullptr;
  std::unordered_map<std::uint64_t, Pending> pending_;
  std::uint64_t next_task_ = 0;
  std::uint64_t selected_ = 0;      // rollouts started, capped at t_max
  std::uint64_t worker_tasks_ = 0;  // task indices handed to a worker pool
  std::uint64_t completed_ = 0;
  std::uint64_t max_root_unobserved_ = 0;
  PhaseTimes phase_;
  std::vector<UpdateEvent> events_;
};

}  // namespace

PlanResult parallel_plan(ParallelMode mode, const Environment& env, const State& root_state,
                         const SearchSettings& settings) {
  settings.validate();
  return Master(mode, env, root_state, settings).run();
}

PlanResult wu_uct_plan(const Environment& env, const State& root_state,
                       const SearchSettings& settings) {
  return parallel_plan(ParallelMode::kWuUct, env, root_state, settings);
}

PlanResult naive_parallel_plan(const Environment& env, const State& root_state,
                               const SearchSettings& settings) {
  return parallel_plan(ParallelMode::kNaive, env, root_state, settings);
}

std::vector<PathRecord> concurrent_selections(SearchTree& tree, ParallelMode mode,
                                              const PolicyConfig& cfg, Rng& rng, std::size_t k) {
  const ScoreMode score = mode == ParallelMode::kWuUct ? ScoreMode::wu_uct() : ScoreMode::uct();
  std::vector<PathRecord> paths;
  paths.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Selection sel = select_path(tree, score, cfg, rng);
    sel.path.task = i;
    if (sel.reason == StopReason::kExpand) {
      const NodeId node = sel.path.nodes.back();
      tree.claim_action(node, choose_expansion_action(tree, node, rng));
    } else if (mode == ParallelMode::kWuUct) {
      incomplete_update(tree, sel.path);
    }
    paths.push_back(std::move(sel.path));
  }
  return paths;
}

std::vector<std::uint64_t> replay_events(SearchTree& tree, const std::vector<UpdateEvent>& events,
                                         double gamma) {
  std::vector<std::uint64_t> root_o;
  root_o.reserve(events.size());
  for (const UpdateEvent& e : events) {
    switch (e.kind) {
      case UpdateEvent::Kind::kIncomplete:
        incomplete_update(tree, e.path);
        break;
      case UpdateEvent::Kind::kComplete:
        complete_update(tree, e.path, e.value, gamma);
        break;
      case UpdateEvent::Kind::kBackprop:
        backpropagate(tree, e.path, e.value, gamma);
        break;
    }
    root_o.push_back(tree.stats(tree.root()).unobserved);
  }
  return root_o;
}

void reset_statistics(SearchTree& tree) {
  SearchTree fresh(tree.action_count(), tree.limits(),
                   RootInfo{tree.stats(tree.root()).depth, tree.stats(tree.root()).edge_reward,
                            tree.stats(tree.root()).terminal});
  for (std::uint32_t i = 1; i < tree.size(); ++i) {
    const NodeId id{i};
    const NodeStats& s = tree.stats(id);
    fresh.expand_attach(*tree.parent(id), *tree.action_into(id), s.edge_reward, s.terminal);
  }
  tree = std::move(fresh);
}

}  // namespace wuuct
