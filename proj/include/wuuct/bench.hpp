#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wuuct/env.hpp"
#include "wuuct/plan_result.hpp"
#include "wuuct/run_report.hpp"
#include "wuuct/search_settings.hpp"

namespace wuuct {

inline const std::vector<std::string> kPlannerNames = {"sequential", "wu-uct", "naive", "leafp",
                                                       "treep", "treep-pc", "rootp"};

// Environment name plus its string-valued parameters.
//   tile-puzzle:    width height colors step_budget goal seed
//   synthetic-tree: branching depth seed
//   either:         delay_us (>0 wraps in DelayWrapper), delay_mode = sleep|spin
struct EnvSpec {
  std::string name = "tile-puzzle";
  std::map<std::string, std::string> params;
};

enum class ReportFormat { kCsv, kJson, kMdTable, kPlot };

struct BenchConfig {
  std::string planner = "wu-uct";
  EnvSpec env;
  SearchSettings search;  // n_exp / n_sim are taken from the grids per cell
  std::vector<std::uint32_t> n_exp_grid{1};
  std::vector<std::uint32_t> n_sim_grid{1};
  std::uint32_t episodes = 1;
  std::vector<std::uint64_t> seeds{1};
  std::uint32_t step_cap = 1000;
  bool warmup = true;
  std::filesystem::path out_dir = "bench_out";
  std::vector<ReportFormat> formats{ReportFormat::kCsv};

  // Throws ConfigError.
  void validate() const;
};

// INI sections: [run] [env] [policy] [workers] [treep] [output]. Unknown keys
// are rejected. Throws ConfigError.
BenchConfig parse_config(std::istream& in);
BenchConfig load_config(const std::filesystem::path& path);
// "joycity-desk" or "atari-desk".
BenchConfig preset_config(const std::string& name);
std::string preset_ini(const std::string& name);

std::unique_ptr<Environment> make_env(const EnvSpec& spec);

// Runs one planning call with the named planner. Throws ConfigError for an
// unknown name.
PlanResult plan_with(const std::string& planner, const Environment& env, const State& state,
                     const SearchSettings& settings);

struct EpisodeResult {
  double episode_return = 0.0;
  std::uint64_t steps = 0;
  std::vector<RunReport> reports;  // one per planning call
};

// Plan, act on best_action, repeat until terminal or step_cap, with a fresh
// tree every step. Planning call k uses rng seed mix64(seed) + k.
EpisodeResult run_episode(const std::string& planner, const Environment& env,
                          const SearchSettings& settings, std::uint64_t seed,
                          std::uint32_t step_cap = 1000);

struct SweepCell {
  std::string planner;
  std::uint32_t n_exp = 1;
  std::uint32_t n_sim = 1;
  std::uint64_t seed = 0;
  double return_mean = 0.0;
  double return_std = 0.0;
  double steps_mean = 0.0;
  double wall_ms_per_plan = 0.0;
  double speedup = 1.0;
  PhaseTimes phase_ms;  // mean per planning call
  std::optional<std::string> error;

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

// Cap on n_exp + n_sim from WUUCT_THREADS_CAP, if set.
std::optional<std::uint32_t> threads_cap_from_env();

// Every (planner, n_exp, n_sim, seed) cell in ascending grid order, one at a
// time. Speedup is relative to the smallest grid cell of the same planner and
// seed. A failing cell is kept with `error` set and the sweep continues.
// When `csv_path` is given each finished cell is appended to it immediately.
std::vector<SweepCell> sweep(const BenchConfig& config, const std::vector<std::string>& planners,
                             const std::optional<std::filesystem::path>& csv_path = std::nullopt,
                             std::ostream* progress = nullptr);

inline const char* const kCsvHeader =
    "planner,n_exp,n_sim,seed,return_mean,return_std,steps_mean,wall_ms_per_plan,speedup,"
    "sel_ms,exp_ms,sim_ms,bp_ms,comm_ms";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SweepCell& cell);
void write_csv(std::ostream& out, const std::vector<SweepCell>& cells);
std::vector<SweepCell> read_csv(std::istream& in);

nlohmann::json cells_to_json(const std::vector<SweepCell>& cells);
std::vector<SweepCell> cells_from_json(const nlohmann::json& j);

// One table per planner: N_exp rows by N_sim columns of speedup.
void write_md_table(std::ostream& out, const std::vector<SweepCell>& cells);
// Whitespace-separated columns for gnuplot:
// planner seed n_exp n_sim speedup return_mean return_std.
void write_plot_data(std::ostream& out, const std::vector<SweepCell>& cells);

// Writes the requested formats into out_dir (sweep.csv, sweep.json,
// speedup.md, speedup.dat). Cells with an error are written to failures.log only.
std::vector<std::filesystem::path> emit_report(const std::vector<SweepCell>& cells,
                                               const std::vector<ReportFormat>& formats,
                                               const std::filesystem::path& out_dir);

}  // namespace wuuct
