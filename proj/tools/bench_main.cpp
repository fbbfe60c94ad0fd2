#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wuuct/bench.hpp"
#include "wuuct/errors.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

struct Overrides {
  std::string planner;
  std::vector<std::uint32_t> n_sim;
  std::optional<std::uint64_t> t_max;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// A path to an INI file, or the name of a bundled preset.
wuuct::BenchConfig load(const std::string& source, const Overrides& o) {
  wuuct::BenchConfig cfg = std::filesystem::exists(source) ? wuuct::load_config(source)
                                                           : wuuct::preset_config(source);
  if (!o.planner.empty()) cfg.planner = o.planner;
  if (!o.n_sim.empty()) cfg.n_sim_grid = o.n_sim;
  if (o.t_max) cfg.search.t_max = *o.t_max;
  if (o.seed) cfg.seeds = {*o.seed};
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

void split_planners(const std::string& text, std::vector<std::string>& out) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
}

int cmd_run(const wuuct::BenchConfig& cfg) {
  auto env = wuuct::make_env(cfg.env);
  wuuct::SearchSettings s = cfg.search;
  s.n_exp = cfg.n_exp_grid.front();
  s.n_sim = cfg.n_sim_grid.front();
  auto out = nlohmann::json::array();
  for (std::uint64_t seed : cfg.seeds) {
    for (std::uint32_t e = 0; e < cfg.episodes; ++e) {
      wuuct::EpisodeResult ep = wuuct::run_episode(cfg.planner, *env, s, seed + e, cfg.step_cap);
      double wall = 0.0;
      nlohmann::json plans = nlohmann::json::array();
      for (const auto& r : ep.reports) {
        wall += r.wall_ms;
        plans.push_back(wuuct::to_json(r));
      }
      std::cout << cfg.planner << " seed=" << seed + e << " return=" << ep.episode_return
                << " steps=" << ep.steps << " wall_ms=" << wall << '\n';
      out.push_back({{"seed", seed + e}, {"return", ep.episode_return}, {"steps", ep.steps},
                     {"plans", std::move(plans)}});
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream(cfg.out_dir / "episodes.json") << out.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const wuuct::BenchConfig& cfg, const std::vector<std::string>& planners) {
  const auto csv = cfg.out_dir / "sweep.partial.csv";
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::remove(csv);
  auto cells = wuuct::sweep(cfg, planners, csv, &std::cout);
  for (const auto& path : wuuct::emit_report(cells, cfg.formats, cfg.out_dir)) {
    std::cout << "wrote " << path.string() << '\n';
  }
  std::filesystem::remove(csv);
  const bool failed = std::any_of(cells.begin(), cells.end(),
                                  [](const wuuct::SweepCell& c) { return c.error.has_value(); });
  return failed ? kRuntimeExit : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel MCTS planner benchmark"};
  app.require_subcommand(1);

  Overrides o;
  std::string config;
  std::string planners;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "INI file or preset name (joycity-desk, atari-desk)")->required();
    sub->add_option("--planner", o.planner, "Planner override");
    sub->add_option("--n-sim", o.n_sim, "Simulation worker grid override")->delimiter(',');
    sub->add_option("--t-max", o.t_max, "Rollouts per planning call");
    sub->add_option("--seed", o.seed, "Single seed override");
    sub->add_option("--out", o.out, "Output directory");
  };
  auto* run = app.add_subcommand("run", "Play episodes with one planner");
  auto* sweep = app.add_subcommand("sweep", "Sweep the worker grid for one planner");
  auto* compare = app.add_subcommand("compare", "Sweep several planners on the same grid");
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  auto* dump = app.add_subcommand("preset", "Print a bundled preset as INI");
  for (auto* sub : {run, sweep, compare, validate}) add_common(sub);
  compare->add_option("--planners", planners, "Comma-separated planner names")->required();
  std::string preset_name;
  dump->add_option("name", preset_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (dump->parsed()) {
      std::cout << wuuct::preset_ini(preset_name);
      return 0;
    }
    const wuuct::BenchConfig cfg = load(config, o);
    if (validate->parsed()) {
      std::cout << "ok: planner=" << cfg.planner << " env=" << cfg.env.name
                << " t_max=" << cfg.search.t_max << " cells="
                << cfg.n_exp_grid.size() * cfg.n_sim_grid.size() * cfg.seeds.size() << '\n';
      return 0;
    }
    if (run->parsed()) return cmd_run(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, {cfg.planner});
    std::vector<std::string> names;
    split_planners(planners, names);
    return cmd_sweep(cfg, names);
  } catch (const wuuct::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeExit;
  }
}
