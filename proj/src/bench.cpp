#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "wuuct/baselines.hpp"
#include "wuuct/bench.hpp"
#include "wuuct/errors.hpp"
#include "wuuct/runtime.hpp"

namespace wuuct {

PlanResult plan_with(const std::string& planner, const Environment& env, const State& state,
                     const SearchSettings& settings) {
  if (planner == "sequential") return sequential_uct_plan(env, state, settings);
  if (planner == "wu-uct") return wu_uct_plan(env, state, settings);
  if (planner == "naive") return naive_parallel_plan(env, state, settings);
  if (planner == "leafp") return leafp_plan(env, state, settings);
  if (planner == "rootp") return rootp_plan(env, state, settings);
  if (planner == "treep" || planner == "treep-pc") {
    SearchSettings s = settings;
    if (planner == "treep") s.treep.n_vl.reset();
    else if (!s.treep.n_vl) s.treep.n_vl = s.treep.r_vl;
    return treep_plan(env, state, s);
  }
  throw ConfigError("unknown planner '" + planner + "'");
}

EpisodeResult run_episode(const std::string& planner, const Environment& env,
                          const SearchSettings& settings, std::uint64_t seed,
                          std::uint32_t step_cap) {
  EpisodeResult result;
  State state = env.initial_state();
  double discount = 1.0;
  while (!env.is_terminal(state) && result.steps < step_cap) {
    SearchSettings s = settings;
    s.policy.rng_seed = mix64(seed) + result.steps;
    PlanResult plan = plan_with(planner, env, state, s);
    if (!plan.best_action) throw InvariantViolation("planner returned no action");
    StepOutcome out = env.step(state, *plan.best_action);
    result.episode_return += discount * out.reward;
    discount *= settings.policy.gamma;
    plan.report.actions.push_back(*plan.best_action);
    result.reports.push_back(std::move(plan.report));
    state = std::move(out.next_state);
    result.steps += 1;
  }
  return result;
}

std::optional<std::uint32_t> threads_cap_from_env() {
  const char* raw = std::getenv("WUUCT_THREADS_CAP");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v == 0) throw ConfigError("WUUCT_THREADS_CAP must be a positive integer");
  return static_cast<std::uint32_t>(v);
}

namespace {

struct CellRun {
  std::vector<double> returns;
  std::vector<double> steps;
  double wall_ms = 0.0;
  std::uint64_t plans = 0;
  PhaseTimes phase;
};

void run_cell(const BenchConfig& config, const std::string& planner, const Environment& env,
              const SearchSettings& settings, std::uint64_t seed, SweepCell& cell) {
  if (config.warmup) run_episode(planner, env, settings, seed, config.step_cap);
  CellRun run;
  for (std::uint32_t e = 0; e < config.episodes; ++e) {
    EpisodeResult ep = run_episode(planner, env, settings, seed + e, config.step_cap);
    run.returns.push_back(ep.episode_return);
    run.steps.push_back(static_cast<double>(ep.steps));
    for (const auto& r : ep.reports) {
      run.wall_ms += r.wall_ms;
      run.phase += r.phase_ms;
      run.plans += 1;
    }
  }
  const double n = static_cast<double>(run.returns.size());
  double mean = 0.0;
  for (double r : run.returns) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : run.returns) var += (r - mean) * (r - mean);
  cell.return_mean = mean;
  cell.return_std = std::sqrt(var / n);
  double steps = 0.0;
  for (double s : run.steps) steps += s;
  cell.steps_mean = steps / n;
  if (run.plans > 0) {
    const double p = static_cast<double>(run.plans);
    cell.wall_ms_per_plan = run.wall_ms / p;
    cell.phase_ms = {run.phase.selection / p, run.phase.expansion / p, run.phase.simulation / p,
                     run.phase.backprop / p, run.phase.communication / p};
  }
}

}  // namespace

std::vector<SweepCell> sweep(const BenchConfig& config, const std::vector<std::string>& planners,
                             const std::optional<std::filesystem::path>& csv_path,
                             std::ostream* progress) {
  config.validate();
  if (planners.empty()) throw ConfigError("no planners to run");
  for (const auto& p : planners) {
    if (std::find(kPlannerNames.begin(), kPlannerNames.end(), p) == kPlannerNames.end()) {
      throw ConfigError("unknown planner '" + p + "'");
    }
  }
  const auto cap = threads_cap_from_env();
  auto exp_grid = config.n_exp_grid;
  auto sim_grid = config.n_sim_grid;
  std::sort(exp_grid.begin(), exp_grid.end());
  std::sort(sim_grid.begin(), sim_grid.end());
  exp_grid.erase(std::unique(exp_grid.begin(), exp_grid.end()), exp_grid.end());
  sim_grid.erase(std::unique(sim_grid.begin(), sim_grid.end()), sim_grid.end());

  std::unique_ptr<Environment> env = make_env(config.env);
  std::ofstream csv;
  if (csv_path) {
    const bool fresh = !std::filesystem::exists(*csv_path) || std::filesystem::file_size(*csv_path) == 0;
    if (csv_path->has_parent_path()) std::filesystem::create_directories(csv_path->parent_path());
    csv.open(*csv_path, std::ios::app);
    if (!csv) throw Error("cannot open " + csv_path->string());
    if (fresh) {
      write_csv_header(csv);
      csv.flush();
    }
  }

  std::vector<SweepCell> cells;
  for (const auto& planner : planners) {
    for (std::uint64_t seed : config.seeds) {
      std::optional<double> base_wall;
      for (std::uint32_t n_exp : exp_grid) {
        for (std::uint32_t n_sim : sim_grid) {
          SweepCell cell;
          cell.planner = planner;
          cell.n_exp = n_exp;
          cell.n_sim = n_sim;
          cell.seed = seed;
          try {
            if (cap && n_exp + n_sim > *cap) {
              throw ConfigError("exceeds WUUCT_THREADS_CAP=" + std::to_string(*cap));
            }
            SearchSettings s = config.search;
            s.n_exp = n_exp;
            s.n_sim = n_sim;
            run_cell(config, planner, *env, s, seed, cell);
            if (!base_wall) base_wall = cell.wall_ms_per_plan;
            cell.speedup = cell.wall_ms_per_plan > 0.0 ? *base_wall / cell.wall_ms_per_plan : 1.0;
          } catch (const std::exception& e) {
            cell.error = e.what();
            cell.speedup = std::nan("");
          }
          if (progress != nullptr) {
            *progress << planner << " n_exp=" << n_exp << " n_sim=" << n_sim << " seed=" << seed;
            if (cell.error) *progress << " FAILED: " << *cell.error << '\n';
            else *progress << " return=" << cell.return_mean << " wall_ms=" << cell.wall_ms_per_plan
                           << " speedup=" << cell.speedup << '\n';
          }
          if (csv.is_open() && !cell.error) {
            write_csv_row(csv, cell);
            csv.flush();
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

}  // namespace wuuct
