#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wuuct/bench.hpp"
#include "wuuct/delay_wrapper.hpp"
#include "wuuct/errors.hpp"
#include "wuuct/synthetic_tree_env.hpp"
#include "wuuct/tile_puzzle_env.hpp"

namespace wuuct {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(trim(text));
  T value{};
  in >> value;
  if (in.fail() || !in.eof()) throw ConfigError("bad value for " + key + ": '" + text + "'");
  if constexpr (std::is_unsigned_v<T>) {
    if (trim(text).starts_with("-")) throw ConfigError(key + " must be non-negative");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  if (s == "md" || s == "md-table") return ReportFormat::kMdTable;
  if (s == "plot" || s == "dat") return ReportFormat::kPlot;
  throw ConfigError("unknown output format '" + s + "'");
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"run", {"planner", "t_max", "d_max", "max_children", "episodes", "seeds", "step_cap", "warmup",
             "serialize"}},
    {"env", {"name", "width", "height", "colors", "step_budget", "goal", "seed", "branching",
             "depth", "delay_us", "delay_mode"}},
    {"policy", {"beta", "gamma", "expand_stop_prob", "rollout_horizon", "value_blend"}},
    {"workers", {"n_exp", "n_sim"}},
    {"treep", {"r_vl", "n_vl"}},
    {"output", {"dir", "formats"}},
};

std::uint32_t env_u32(const EnvSpec& spec, const std::string& key, std::uint32_t fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : parse_number<std::uint32_t>(key, it->second);
}

std::uint64_t env_u64(const EnvSpec& spec, const std::string& key, std::uint64_t fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

}  // namespace

void BenchConfig::validate() const {
  if (std::find(kPlannerNames.begin(), kPlannerNames.end(), planner) == kPlannerNames.end()) {
    throw ConfigError("unknown planner '" + planner + "'");
  }
  if (n_exp_grid.empty() || n_sim_grid.empty()) throw ConfigError("worker grids must be non-empty");
  for (auto n : n_exp_grid) {
    if (n == 0) throw ConfigError("n_exp values must be >= 1");
  }
  for (auto n : n_sim_grid) {
    if (n == 0) throw ConfigError("n_sim values must be >= 1");
  }
  if (episodes == 0) throw ConfigError("episodes must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (step_cap == 0) throw ConfigError("step_cap must be >= 1");
  search.validate();
  make_env(env);
}

BenchConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  BenchConfig cfg;
  for (const auto& [section, body] : tree) {
    auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
      const std::string v = trim(value.data());
      const std::string full = section + "." + key;
      if (section == "run") {
        if (key == "planner") cfg.planner = v;
        else if (key == "t_max") cfg.search.t_max = parse_number<std::uint64_t>(full, v);
        else if (key == "d_max") cfg.search.limits.max_depth = parse_number<std::uint32_t>(full, v);
        else if (key == "max_children") cfg.search.limits.max_children = parse_number<std::uint32_t>(full, v);
        else if (key == "episodes") cfg.episodes = parse_number<std::uint32_t>(full, v);
        else if (key == "seeds") cfg.seeds = parse_list<std::uint64_t>(full, v);
        else if (key == "step_cap") cfg.step_cap = parse_number<std::uint32_t>(full, v);
        else if (key == "warmup") cfg.warmup = parse_bool(full, v);
        else if (key == "serialize") cfg.search.serialize = parse_bool(full, v);
      } else if (section == "env") {
        if (key == "name") cfg.env.name = v;
        else cfg.env.params[key] = v;
      } else if (section == "policy") {
        auto& p = cfg.search.policy;
        if (key == "beta") p.beta = parse_number<double>(full, v);
        else if (key == "gamma") p.gamma = parse_number<double>(full, v);
        else if (key == "expand_stop_prob") p.expand_stop_prob = parse_number<double>(full, v);
        else if (key == "value_blend") p.value_blend = parse_number<double>(full, v);
        else if (key == "rollout_horizon") {
          if (v.empty() || v == "none") p.rollout_horizon.reset();
          else p.rollout_horizon = parse_number<std::uint32_t>(full, v);
        }
      } else if (section == "workers") {
        if (key == "n_exp") cfg.n_exp_grid = parse_list<std::uint32_t>(full, v);
        else cfg.n_sim_grid = parse_list<std::uint32_t>(full, v);
      } else if (section == "treep") {
        if (key == "r_vl") cfg.search.treep.r_vl = parse_number<double>(full, v);
        else if (v.empty() || v == "none") cfg.search.treep.n_vl.reset();
        else cfg.search.treep.n_vl = parse_number<double>(full, v);
      } else if (section == "output") {
        if (key == "dir") cfg.out_dir = v;
        else {
          cfg.formats.clear();
          for (const auto& f : split_list(v)) cfg.formats.push_back(parse_format(f));
        }
      }
    }
  }
  cfg.validate();
  return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

std::string preset_ini(const std::string& name) {
  if (name == "joycity-desk") {
    return R"([run]
planner = wu-uct
t_max = 500
d_max = 100
max_children = 20
episodes = 10
seeds = 1
step_cap = 100

[env]
name = tile-puzzle
width = 6
height = 6
colors = 4
step_budget = 10
goal = 24
seed = 1

[policy]
beta = 0.25
gamma = 0.99
expand_stop_prob = 0.5
value_blend = 0.0

[workers]
n_exp = 1
n_sim = 1,4,16

[treep]
r_vl = 1.0

[output]
dir = bench_out/joycity-desk
formats = csv,json,md,plot
)";
  }
  if (name == "atari-desk") {
    return R"([run]
planner = wu-uct
t_max = 128
d_max = 100
max_children = 20
episodes = 1
seeds = 1
step_cap = 1

[env]
name = synthetic-tree
branching = 4
depth = 24
seed = 7
delay_us = 10000
delay_mode = sleep

[policy]
beta = 1.0
gamma = 0.99
expand_stop_prob = 0.5
value_blend = 0.0

[workers]
n_exp = 1
n_sim = 1,2,4,8,16

[treep]
r_vl = 1.0

[output]
dir = bench_out/atari-desk
formats = csv,json,md,plot
)";
  }
  throw ConfigError("unknown preset '" + name + "'");
}

BenchConfig preset_config(const std::string& name) {
  std::istringstream in(preset_ini(name));
  return parse_config(in);
}

std::unique_ptr<Environment> make_env(const EnvSpec& spec) {
  std::unique_ptr<Environment> env;
  const auto allowed = [&](std::set<std::string> keys) {
    keys.insert("delay_us");
    keys.insert("delay_mode");
    for (const auto& [k, v] : spec.params) {
      if (!keys.contains(k)) throw ConfigError("parameter '" + k + "' does not apply to " + spec.name);
    }
  };
  try {
    if (spec.name == "tile-puzzle") {
      allowed({"width", "height", "colors", "step_budget", "goal", "seed"});
      TilePuzzleParams p;
      p.width = env_u32(spec, "width", p.width);
      p.height = env_u32(spec, "height", p.height);
      p.colors = env_u32(spec, "colors", p.colors);
      p.step_budget = env_u32(spec, "step_budget", p.step_budget);
      p.goal = env_u32(spec, "goal", p.goal);
      p.seed = env_u64(spec, "seed", p.seed);
      env = std::make_unique<TilePuzzleEnv>(p);
    } else if (spec.name == "synthetic-tree") {
      allowed({"branching", "depth", "seed"});
      env = std::make_unique<SyntheticTreeEnv>(env_u32(spec, "branching", 4),
                                               env_u32(spec, "depth", 6), env_u64(spec, "seed", 1));
    } else {
      throw ConfigError("unknown environment '" + spec.name + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid environment parameters: ") + e.what());
  }

  const std::uint64_t delay = env_u64(spec, "delay_us", 0);
  if (delay > 0) {
    DelayMode mode = DelayMode::kSleep;
    if (auto it = spec.params.find("delay_mode"); it != spec.params.end()) {
      if (it->second == "spin") mode = DelayMode::kSpin;
      else if (it->second != "sleep") throw ConfigError("delay_mode must be sleep or spin");
    }
    env = std::make_unique<DelayWrapper>(std::move(env), std::chrono::microseconds(delay), mode);
  }
  return env;
}

}  // namespace wuuct
