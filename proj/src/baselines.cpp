#include "wuuct/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "wuuct/state_buffer.hpp"
#include "wuuct/worker_pool.hpp"

namespace wuuct {

namespace {

double to_ms(Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

template <typename Fn>
auto timed(double& sink_ms, Fn&& fn) {
  const auto start = Clock::now();
  if constexpr (std::is_void_v<decltype(fn())>) {
    fn();
    sink_ms += to_ms(Clock::now() - start);
  } else {
    auto out = fn();
    sink_ms += to_ms(Clock::now() - start);
    return out;
  }
}

SearchTree make_tree(const Environment& env, const State& root_state, const SearchSettings& s) {
  return SearchTree(env.action_count(), s.limits, RootInfo{0, 0.0, env.is_terminal(root_state)});
}

void log_event(std::vector<UpdateEvent>* events, const SearchTree& tree, UpdateEvent::Kind kind,
               const PathRecord& path, double value) {
  if (events == nullptr) return;
  events->push_back(UpdateEvent{kind, path, value, tree.stats(tree.root()).unobserved});
}

// The four-step loop shared by sequential UCT and every root-parallel worker.
// `states` must hold the state of tree.root().
void run_sequential(const Environment& env, SearchTree& tree, StateBuffer& states,
                    std::uint64_t budget, const PolicyConfig& cfg, std::uint64_t seed,
                    PhaseTimes& phase, std::vector<UpdateEvent>* events) {
  Rng rng(seed);
  for (std::uint64_t t = 0; t < budget; ++t) {
    ActionId action{};
    Selection sel = timed(phase.selection, [&] {
      Selection s = select_path(tree, ScoreMode::uct(), cfg, rng);
      if (s.reason == StopReason::kExpand) {
        action = choose_expansion_action(tree, s.path.nodes.back(), rng);
      }
      return s;
    });
    PathRecord& path = sel.path;
    path.task = t;
    NodeId leaf = path.nodes.back();
    bool terminal = sel.reason == StopReason::kTerminal;

    if (sel.reason == StopReason::kExpand) {
      StepOutcome out = timed(phase.expansion, [&] { return env.step(states.get(leaf), action); });
      leaf = tree.expand_attach(leaf, action, out.reward, out.terminal);
      states.put(leaf, std::move(out.next_state));
      path.nodes.push_back(leaf);
      terminal = out.terminal;
    }

    double ret = 0.0;
    if (!terminal) {
      ret = timed(phase.simulation, [&] {
        Rng sim_rng(task_seed(seed, t));
        return rollout(env, states.get(leaf), cfg, sim_rng);
      });
    }
    timed(phase.backprop, [&] { backpropagate(tree, path, ret, cfg.gamma); });
    log_event(events, tree, UpdateEvent::Kind::kBackprop, path, ret);
  }
}

RunReport base_report(const char* planner, const SearchTree& tree, const SearchSettings& s) {
  RunReport r;
  r.planner = planner;
  r.best_action = best_root_action(tree);
  if (r.best_action) r.episode_return = tree.stats(*tree.child(tree.root(), *r.best_action)).value;
  r.rollouts = tree.stats(tree.root()).visits;
  r.seed = s.policy.rng_seed;
  r.config = {{"t_max", std::to_string(s.t_max)},
              {"d_max", std::to_string(s.limits.max_depth)},
              {"max_children", std::to_string(s.limits.max_children)},
              {"beta", std::to_string(s.policy.beta)},
              {"gamma", std::to_string(s.policy.gamma)},
              {"expand_stop_prob", std::to_string(s.policy.expand_stop_prob)},
              {"n_sim", std::to_string(s.n_sim)}};
  return r;
}

PlanResult package(const char* planner, SearchTree tree, const SearchSettings& s,
                   PhaseTimes phase, double wall_ms, std::vector<UpdateEvent> events) {
  RunReport r = base_report(planner, tree, s);
  r.phase_ms = phase;
  r.wall_ms = wall_ms;
  const auto best = r.best_action;
  return PlanResult{best, std::move(r), std::move(tree), std::move(events)};
}

}  // namespace

PlanResult sequential_uct_plan(const Environment& env, const State& root_state,
                               const SearchSettings& settings) {
  settings.validate();
  const auto start = Clock::now();
  SearchTree tree = make_tree(env, root_state, settings);
  StateBuffer states;
  states.put(tree.root(), root_state);
  PhaseTimes phase;
  std::vector<UpdateEvent> events;
  run_sequential(env, tree, states, settings.t_max, settings.policy, settings.policy.rng_seed,
                 phase, settings.record_events ? &events : nullptr);
  const double wall = to_ms(Clock::now() - start);
  PlanResult result = package("sequential", std::move(tree), settings, phase, wall, std::move(events));
  if (wall > 0.0) result.report.occupancy.simulation = phase.simulation / wall;
  return result;
}

PlanResult leafp_plan(const Environment& env, const State& root_state,
                      const SearchSettings& settings) {
  settings.validate();
  const auto start = Clock::now();
  const PolicyConfig& cfg = settings.policy;
  SearchTree tree = make_tree(env, root_state, settings);
  StateBuffer states;
  states.put(tree.root(), root_state);
  PhaseTimes phase;
  std::vector<UpdateEvent> events;
  auto* log = settings.record_events ? &events : nullptr;
  Rng rng(cfg.rng_seed);
  WorkerPool pool(WorkerPool::Kind::kSimulation, settings.n_sim, env, cfg);

  std::uint64_t completed = 0;
  std::uint64_t submitted = 0;
  while (completed < settings.t_max) {
    const std::uint64_t batch = std::min<std::uint64_t>(settings.n_sim, settings.t_max - completed);
    ActionId action{};
    Selection sel = timed(phase.selection, [&] {
      Selection s = select_path(tree, ScoreMode::uct(), cfg, rng);
      if (s.reason == StopReason::kExpand) {
        action = choose_expansion_action(tree, s.path.nodes.back(), rng);
      }
      return s;
    });
    PathRecord& path = sel.path;
    path.task = completed;
    NodeId leaf = path.nodes.back();
    bool terminal = sel.reason == StopReason::kTerminal;
    if (sel.reason == StopReason::kExpand) {
      StepOutcome out = timed(phase.expansion, [&] { return env.step(states.get(leaf), action); });
      leaf = tree.expand_attach(leaf, action, out.reward, out.terminal);
      states.put(leaf, std::move(out.next_state));
      path.nodes.push_back(leaf);
      terminal = out.terminal;
    }

    std::vector<double> returns(batch, 0.0);
    if (!terminal) {
      submitted += batch;
      for (std::uint64_t i = 0; i < batch; ++i) {
        const std::uint64_t tau = completed + i;
        pool.submit(Task{tau, SimulationTask{leaf, states.duplicate(leaf),
                                             task_seed(cfg.rng_seed, tau)}});
      }
      timed(phase.simulation, [&] {
        for (std::uint64_t i = 0; i < batch; ++i) {
          TaskResult r = pool.receive();
          if (const auto* f = std::get_if<TaskFailure>(&r.payload)) {
            throw TransportError("simulation failed: " + f->message);
          }
          returns[r.index - completed] = std::get<SimulationResult>(r.payload).value;
        }
      });
    }
    timed(phase.backprop, [&] {
      for (double ret : returns) {
        backpropagate(tree, path, ret, cfg.gamma);
        log_event(log, tree, UpdateEvent::Kind::kBackprop, path, ret);
      }
    });
    completed += batch;
  }
  const double wall = to_ms(Clock::now() - start);
  const auto busy = pool.busy_time();
  pool.shutdown();
  PlanResult result = package("leafp", std::move(tree), settings, phase, wall, std::move(events));
  result.report.tasks_dispatched = submitted;
  if (wall > 0.0) result.report.occupancy.simulation = to_ms(busy) / (wall * settings.n_sim);
  return result;
}

PlanResult treep_plan(const Environment& env, const State& root_state,
                      const SearchSettings& settings) {
  settings.validate();
  const auto start = Clock::now();
  const PolicyConfig& cfg = settings.policy;
  const ScoreMode mode = settings.treep.n_vl
                             ? ScoreMode::pseudo_count(settings.treep.r_vl, *settings.treep.n_vl)
                             : ScoreMode::virtual_loss(settings.treep.r_vl);

  SearchTree tree = make_tree(env, root_state, settings);
  StateBuffer states;
  states.put(tree.root(), root_state);
  Rng rng(cfg.rng_seed);
  std::mutex mu;
  std::uint64_t started = 0;
  std::vector<UpdateEvent> events;
  auto* log = settings.record_events ? &events : nullptr;
  std::vector<PhaseTimes> phases(settings.n_sim);
  std::exception_ptr failure;

  auto worker = [&](std::uint32_t id, const Environment& wenv) {
    PhaseTimes& phase = phases[id];
    try {
      while (true) {
        Selection sel;
        ActionId action{};
        State state;
        {
          std::lock_guard lock(mu);
          if (started >= settings.t_max || failure) return;
          sel = timed(phase.selection, [&] { return select_path(tree, mode, cfg, rng); });
          sel.path.task = started++;
          const NodeId node = sel.path.nodes.back();
          timed(phase.backprop, [&] {
            incomplete_update(tree, sel.path);
            log_event(log, tree, UpdateEvent::Kind::kIncomplete, sel.path, 0.0);
          });
          if (sel.reason == StopReason::kTerminal) {
            timed(phase.backprop, [&] {
              complete_update(tree, sel.path, 0.0, cfg.gamma);
              log_event(log, tree, UpdateEvent::Kind::kComplete, sel.path, 0.0);
            });
            continue;
          }
          if (sel.reason == StopReason::kExpand) {
            action = choose_expansion_action(tree, node, rng);
            tree.claim_action(node, action);
          }
          state = states.duplicate(node);
        }

        std::optional<StepOutcome> expanded;
        bool terminal = false;
        if (sel.reason == StopReason::kExpand) {
          expanded = timed(phase.expansion, [&] { return wenv.step(state, action); });
          terminal = expanded->terminal;
        }
        double ret = 0.0;
        if (!terminal) {
          const State& from = expanded ? expanded->next_state : state;
          ret = timed(phase.simulation, [&] {
            Rng sim_rng(task_seed(cfg.rng_seed, sel.path.task));
            return rollout(wenv, from, cfg, sim_rng);
          });
        }

        std::lock_guard lock(mu);
        timed(phase.backprop, [&] {
          if (expanded) {
            const NodeId parent = sel.path.nodes.back();
            const NodeId child =
                tree.expand_attach(parent, action, expanded->reward, expanded->terminal);
            states.put(child, std::move(expanded->next_state));
            PathRecord child_only{{child}, sel.path.task};
            incomplete_update(tree, child_only);
            log_event(log, tree, UpdateEvent::Kind::kIncomplete, child_only, 0.0);
            sel.path.nodes.push_back(child);
          }
          complete_update(tree, sel.path, ret, cfg.gamma);
          log_event(log, tree, UpdateEvent::Kind::kComplete, sel.path, ret);
        });
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
    }
  };

  std::vector<std::unique_ptr<Environment>> envs;
  for (std::uint32_t i = 0; i < settings.n_sim; ++i) envs.push_back(env.clone());
  {
    std::vector<std::jthread> threads;
    for (std::uint32_t i = 0; i < settings.n_sim; ++i) {
      threads.emplace_back(worker, i, std::cref(*envs[i]));
    }
  }
  if (failure) std::rethrow_exception(failure);

  const double wall = to_ms(Clock::now() - start);
  PhaseTimes mean;
  for (const auto& p : phases) mean += p;
  const double n = static_cast<double>(settings.n_sim);
  const double sim_total = mean.simulation;
  mean = {mean.selection / n, mean.expansion / n, mean.simulation / n, mean.backprop / n, 0.0};
  PlanResult result = package(settings.treep.n_vl ? "treep-pc" : "treep", std::move(tree), settings,
                              mean, wall, std::move(events));
  result.report.tasks_dispatched = started;
  result.report.config["r_vl"] = std::to_string(settings.treep.r_vl);
  if (settings.treep.n_vl) result.report.config["n_vl"] = std::to_string(*settings.treep.n_vl);
  if (wall > 0.0) result.report.occupancy.simulation = sim_total / (wall * n);
  return result;
}

std::uint64_t rootp_child_budget(std::uint64_t t_max, std::uint32_t children) {
  if (children == 0) throw ContractViolation("root parallelization needs at least one child");
  return (t_max + children - 1) / children;
}

ChildAggregate merge_child_stats(const ChildAggregate& a, const ChildAggregate& b) {
  const std::uint64_t n = a.visits + b.visits;
  if (n == 0) return {};
  return {n, (static_cast<double>(a.visits) * a.value + static_cast<double>(b.visits) * b.value) /
                 static_cast<double>(n)};
}

PlanResult rootp_plan(const Environment& env, const State& root_state,
                      const SearchSettings& settings) {
  settings.validate();
  const auto start = Clock::now();
  const PolicyConfig& cfg = settings.policy;
  // Worker trees may each grow up to the cap, so their union is only bounded
  // by the action count.
  TreeLimits merged_limits = settings.limits;
  merged_limits.max_children = env.action_count();
  SearchTree tree(env.action_count(), merged_limits,
                  RootInfo{0, 0.0, env.is_terminal(root_state)});
  PhaseTimes phase;

  if (tree.stats(tree.root()).terminal) {
    PathRecord root_path{{tree.root()}, 0};
    for (std::uint64_t t = 0; t < settings.t_max; ++t) backpropagate(tree, root_path, 0.0, cfg.gamma);
    return package("rootp", std::move(tree), settings, phase, to_ms(Clock::now() - start), {});
  }

  const std::uint32_t k = std::min(env.action_count(), settings.limits.max_children);
  std::vector<NodeId> children;
  std::vector<State> child_states;
  timed(phase.expansion, [&] {
    for (std::uint32_t a = 0; a < k; ++a) {
      StepOutcome out = env.step(root_state, ActionId{a});
      children.push_back(tree.expand_attach(tree.root(), ActionId{a}, out.reward, out.terminal));
      child_states.push_back(std::move(out.next_state));
    }
  });

  // Split each child's budget into enough chunks to keep every worker busy.
  const std::uint64_t per_child = rootp_child_budget(settings.t_max, k);
  const std::uint64_t parts =
      std::min<std::uint64_t>(per_child, (settings.n_sim + k - 1) / k);
  struct Unit {
    std::uint32_t child;
    std::uint64_t budget;
  };
  std::vector<Unit> units;
  for (std::uint32_t c = 0; c < k; ++c) {
    for (std::uint64_t p = 0; p < parts; ++p) {
      const std::uint64_t budget = per_child / parts + (p < per_child % parts ? 1 : 0);
      if (budget > 0) units.push_back({c, budget});
    }
  }

  std::vector<std::optional<SearchTree>> unit_trees(units.size());
  std::vector<PhaseTimes> unit_phase(units.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mu;
  std::exception_ptr failure;
  auto worker = [&](const Environment& wenv) {
    try {
      for (std::size_t u = next++; u < units.size(); u = next++) {
        const NodeId child = children[units[u].child];
        const NodeStats& cs = tree.stats(child);
        SearchTree local(wenv.action_count(), settings.limits,
                         RootInfo{cs.depth, cs.edge_reward, cs.terminal});
        StateBuffer states;
        states.put(local.root(), child_states[units[u].child]);
        run_sequential(wenv, local, states, units[u].budget, cfg, task_seed(cfg.rng_seed, u),
                       unit_phase[u], nullptr);
        unit_trees[u] = std::move(local);
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::unique_ptr<Environment>> envs;
  for (std::uint32_t i = 0; i < settings.n_sim; ++i) envs.push_back(env.clone());
  {
    std::vector<std::jthread> threads;
    for (std::uint32_t i = 0; i < settings.n_sim; ++i) threads.emplace_back(worker, std::cref(*envs[i]));
  }
  if (failure) std::rethrow_exception(failure);

  // Gather: merge every worker tree under its root child, then rebuild the
  // root's statistics from its children.
  timed(phase.backprop, [&] {
    for (std::size_t u = 0; u < units.size(); ++u) {
      tree.merge_from(children[units[u].child], *unit_trees[u], unit_trees[u]->root());
    }
    NodeStats& root = tree.stats(tree.root());
    std::uint64_t visits = 0;
    double weighted = 0.0;
    double shadow = 0.0;
    for (NodeId c : children) {
      const NodeStats& cs = tree.stats(c);
      visits += cs.visits;
      weighted += static_cast<double>(cs.visits) * (root.edge_reward + cfg.gamma * cs.value);
      shadow += static_cast<double>(cs.visits) * root.edge_reward +
                cfg.gamma * tree.shadow_return_sum(c);
    }
    root.visits = visits;
    root.value = visits > 0 ? weighted / static_cast<double>(visits) : 0.0;
    tree.set_shadow(tree.root(), shadow, 0);
  });

  PhaseTimes worker_mean;
  for (const auto& p : unit_phase) worker_mean += p;
  const double n = static_cast<double>(settings.n_sim);
  const double sim_total = worker_mean.simulation;
  phase.selection += worker_mean.selection / n;
  phase.expansion += worker_mean.expansion / n;
  phase.simulation += worker_mean.simulation / n;
  phase.backprop += worker_mean.backprop / n;
  const double wall = to_ms(Clock::now() - start);
  PlanResult result = package("rootp", std::move(tree), settings, phase, wall, {});
  result.report.tasks_dispatched = per_child * k;
  if (wall > 0.0) result.report.occupancy.simulation = sim_total / (wall * n);
  return result;
}

}  // namespace wuuct
