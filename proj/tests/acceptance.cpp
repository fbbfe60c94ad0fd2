// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "support.hpp"
#include "wuuct/baselines.hpp"
#include "wuuct/bench.hpp"
#include "wuuct/delay_wrapper.hpp"
#include "wuuct/policy.hpp"
#include "wuuct/runtime.hpp"
#include "wuuct/synthetic_tree_env.hpp"
#include "wuuct/tile_puzzle_env.hpp"

using namespace wuuct;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

NodeStats stats(std::uint64_t n, double v, std::uint64_t o = 0) {
  NodeStats s;
  s.visits = n;
  s.value = v;
  s.unobserved = o;
  return s;
}

// Log-uniform integer in [lo, hi].
std::uint64_t log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi + 1.0));
  const auto v = static_cast<std::uint64_t>(std::exp(u(rng)));
  return std::clamp<std::uint64_t>(v, static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi));
}

Outcome sequential_equivalence() {
  const auto t0 = Clock::now();
  int failures = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SyntheticTreeEnv env(4, 6, seed);
    SearchSettings s;
    s.t_max = 128;
    s.policy.rng_seed = seed;
    const PlanResult seq = sequential_uct_plan(env, env.initial_state(), s);

    SearchSettings wu = s;
    wu.serialize = true;
    wu.n_exp = 2;
    wu.n_sim = 4;
    SearchSettings leaf = s;
    leaf.n_sim = 1;
    SearchSettings tree = s;
    tree.n_sim = 1;
    tree.treep.r_vl = 0.0;
    const std::pair<const char*, PlanResult> runs[] = {
        {"wu-uct serialized", wu_uct_plan(env, env.initial_state(), wu)},
        {"leafp", leafp_plan(env, env.initial_state(), leaf)},
        {"treep", treep_plan(env, env.initial_state(), tree)},
    };
    for (const auto& [name, r] : runs) {
      const std::string diff = testing::tree_difference(seq.tree, r.tree, 1e-12);
      if (!diff.empty()) {
        ++failures;
        if (first.empty()) first = std::string(name) + " seed " + std::to_string(seed) + ": " + diff;
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "60 comparisons, " << failures << " mismatches, " << secs << " s";
  if (!first.empty()) d << " (first: " << first << ")";
  return {failures == 0 && secs < 60.0, d.str()};
}

Outcome score_formulas() {
  std::mt19937_64 rng(2024);
  // Non-negative values, as for every bundled environment. A negative V close
  // to -exploration cancels and no double sum can meet a relative bound there.
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::uniform_real_distribution<double> signed_value(-10.0, 10.0);
  std::uniform_real_distribution<double> beta(0.0, 4.0);
  std::uniform_real_distribution<double> loss(0.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t pn = log_uniform(rng, 1, 1e7);
    const std::uint64_t po = rng() % 64;
    const std::uint64_t cn = 1 + rng() % pn;
    const std::uint64_t co = rng() % (po + 1);
    const double b = beta(rng);
    const NodeStats p = stats(pn, 0.0, po);
    const NodeStats c = stats(cn, value(rng), co);
    worst = std::max(worst, testing::relative_error(uct_score(p, c, b), testing::oracle_uct(p, c, b)));
    worst = std::max(worst,
                     testing::relative_error(wu_uct_score(p, c, b), testing::oracle_wu_uct(p, c, b)));
    const NodeStats q = stats(rng() % 1000000, signed_value(rng));
    const double r = loss(rng);
    const double n = (q.visits == 0 ? 0.5 : 0.0) + loss(rng);
    worst = std::max(worst, testing::relative_error(treep_pseudocount_value(q, r, n),
                                                    testing::oracle_pseudocount(q, r, n)));
  }
  const double a = uct_score(stats(4, 0), stats(1, 0.5), 1.0);
  const double b = wu_uct_score(stats(4, 0, 2), stats(1, 0.5, 1), 1.0);
  const double c = treep_pseudocount_value(stats(4, 1.0), 1.0, 1.0);
  const bool pinned = std::abs(a - 2.16511) < 5e-6 && std::abs(b - 1.83857) < 5e-6 &&
                      std::abs(c - 0.6) < 1e-15;
  std::ostringstream d;
  d << "worst relative error " << worst << " over 3x10^4 evaluations; pinned " << a << ", " << b
    << ", " << c;
  return {worst <= 1e-12 && pinned, d.str()};
}

std::unique_ptr<Environment> random_env(std::mt19937_64& rng) {
  if (rng() % 2 == 0) {
    return std::make_unique<SyntheticTreeEnv>(2 + rng() % 4, 2 + rng() % 7, rng());
  }
  TilePuzzleParams p;
  p.width = 2 + rng() % 3;
  p.height = 2 + rng() % 3;
  p.colors = 2 + rng() % 2;
  p.step_budget = 2 + rng() % 5;
  p.goal = 1 + rng() % (p.width * p.height);
  p.seed = rng();
  return std::make_unique<TilePuzzleEnv>(p);
}

Outcome conservation() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int runs = 0;
  int failures = 0;
  std::string first;
  for (const auto& planner : kPlannerNames) {
    for (int i = 0; i < 200; ++i) {
      const auto env = random_env(rng);
      SearchSettings s;
      s.t_max = 1 + rng() % 200;
      s.n_exp = 1 + rng() % 4;
      s.n_sim = 1 + rng() % 8;
      s.serialize = rng() % 4 == 0;
      s.limits.max_depth = 1 + rng() % 10;
      s.limits.max_children = 1 + rng() % env->action_count();
      s.policy.beta = 2.0 * u(rng);
      s.policy.gamma = 0.5 + 0.5 * u(rng);
      s.policy.expand_stop_prob = u(rng);
      s.policy.rng_seed = rng();
      s.treep.r_vl = 2.0 * u(rng);
      if (rng() % 2 == 0) s.treep.n_vl = 2.0 * u(rng);
      const PlanResult r = plan_with(planner, *env, env->initial_state(), s);
      ++runs;
      const SearchTree& t = r.tree;
      std::uint64_t expected = s.t_max;
      if (planner == "rootp") {
        const auto k = static_cast<std::uint32_t>(t.children(t.root()).size());
        const bool width_ok = k == std::min(env->action_count(), s.limits.max_children);
        expected = width_ok ? k * rootp_child_budget(s.t_max, k) : 0;
      }
      std::string why;
      if (!testing::all_unobserved_zero(t)) why = "O not zero";
      else if (t.stats(t.root()).visits != expected) {
        why = "N_root " + std::to_string(t.stats(t.root()).visits) + " vs " + std::to_string(expected);
      } else if (!visit_conservation_check(t)) {
        why = "conservation check failed";
      }
      if (!why.empty()) {
        ++failures;
        if (first.empty()) first = planner + " run " + std::to_string(i) + ": " + why;
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << runs << " runs, " << failures << " violations, " << secs << " s";
  if (!first.empty()) d << " (first: " << first << ")";
  return {failures == 0 && secs < 300.0, d.str()};
}

Outcome speedup() {
  const auto t0 = Clock::now();
  const DelayWrapper env(std::make_unique<SyntheticTreeEnv>(4, 24, 7), std::chrono::milliseconds(10));
  SearchSettings s = preset_config("atari-desk").search;
  s.t_max = 128;
  s.n_exp = 1;
  s.policy.rng_seed = 7;
  std::vector<double> wall;
  std::ostringstream d;
  const std::uint32_t grid[] = {1, 2, 4, 8, 16};
  for (std::uint32_t n : grid) {
    s.n_sim = n;
    const auto start = Clock::now();
    wu_uct_plan(env, env.initial_state(), s);
    wall.push_back(seconds_since(start));
  }
  bool monotone = true;
  d << "speedup";
  for (std::size_t i = 0; i < wall.size(); ++i) {
    const double sp = wall[0] / wall[i];
    d << " " << grid[i] << ":" << sp;
    if (i > 0 && wall[i] > wall[i - 1]) monotone = false;
  }
  const double s8 = wall[0] / wall[3];
  const double s16 = wall[0] / wall[4];
  const double secs = seconds_since(t0);
  d << (monotone ? ", monotone" : ", not monotone") << ", " << secs << " s";
  return {s8 >= 5.0 && s16 >= 8.0 && monotone && secs < 1200.0, d.str()};
}

double mean_return(const std::string& planner, const Environment& env, SearchSettings s,
                   std::uint32_t n_sim, const BenchConfig& cfg) {
  s.n_sim = n_sim;
  double sum = 0.0;
  for (std::uint32_t e = 0; e < 10; ++e) {
    sum += run_episode(planner, env, s, cfg.seeds.front() + e, cfg.step_cap).episode_return;
  }
  return sum / 10.0;
}

Outcome performance_retention() {
  const auto t0 = Clock::now();
  const BenchConfig cfg = preset_config("joycity-desk");
  const auto env = make_env(cfg.env);
  SearchSettings s = cfg.search;
  s.t_max = 128;
  s.n_exp = 1;
  const double wu1 = mean_return("wu-uct", *env, s, 1, cfg);
  const double wu4 = mean_return("wu-uct", *env, s, 4, cfg);
  const double wu16 = mean_return("wu-uct", *env, s, 16, cfg);
  const double naive16 = mean_return("naive", *env, s, 16, cfg);
  const double leaf16 = mean_return("leafp", *env, s, 16, cfg);
  const double spread = std::max({std::abs(wu4 - wu1), std::abs(wu16 - wu1)});
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "wu-uct means " << wu1 << " / " << wu4 << " / " << wu16 << " (spread " << spread / wu1 * 100
    << "%), naive@16 " << naive16 << ", leafp@16 " << leaf16 << ", " << secs << " s";
  const bool pass = wu1 > 0.0 && spread <= 0.05 * wu1 && wu16 >= naive16 && wu16 >= leaf16 &&
                    secs < 1800.0;
  return {pass, d.str()};
}

Outcome collapse() {
  SearchTree t(2, TreeLimits{0, 20});
  const NodeId a = t.expand_attach(t.root(), ActionId{0}, 0.0, false);
  const NodeId b = t.expand_attach(t.root(), ActionId{1}, 0.0, false);
  t.stats(t.root()).visits = 2;
  for (NodeId id : {a, b}) {
    t.stats(id).visits = 1;
    t.stats(id).value = 0.5;
  }
  PolicyConfig cfg;
  SearchTree naive_tree = t;
  Rng r1(1);
  const auto naive = concurrent_selections(naive_tree, ParallelMode::kNaive, cfg, r1, 8);
  std::set<std::vector<NodeId>> paths;
  for (const auto& p : naive) paths.insert(p.nodes);

  SearchTree wu_tree = t;
  Rng r2(1);
  const auto wu = concurrent_selections(wu_tree, ParallelMode::kWuUct, cfg, r2, 8);
  std::set<NodeId> children;
  for (const auto& p : wu) {
    if (p.nodes.size() > 1) children.insert(p.nodes[1]);
  }
  std::ostringstream d;
  d << "naive " << naive.size() << " selections over " << paths.size()
    << " distinct paths, wu-uct " << wu.size() << " selections over " << children.size()
    << " root children";
  return {naive.size() == 8 && paths.size() == 1 && wu.size() == 8 && children.size() >= 2,
          d.str()};
}

Outcome score_properties() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_real_distribution<double> beta(0.01, 4.0);
  int mono_fail = 0;
  int vanish_fail = 0;
  for (int i = 0; i < 100000; ++i) {
    // Relative score of the on-path child against an off-path sibling.
    const std::uint64_t on = rng() % 4 == 0 ? 0 : log_uniform(rng, 1, 1e6);
    const std::uint64_t off = log_uniform(rng, 1, 1e6);
    const std::uint64_t parent = on + off + log_uniform(rng, 1, 1e6) - 1;
    const std::uint64_t on_o = rng() % (on + 1);
    const std::uint64_t off_o = rng() % (off + 1);
    const std::uint64_t parent_o = std::min(parent, on_o + off_o + rng() % 8);
    const double b = beta(rng);

    SearchTree t(2, TreeLimits{});
    const NodeId c = t.expand_attach(t.root(), ActionId{0}, 0.0, false);
    const NodeId c2 = t.expand_attach(t.root(), ActionId{1}, 0.0, false);
    t.stats(t.root()) = stats(parent - parent_o, 0.0, parent_o);
    t.stats(c) = stats(on - on_o, value(rng), on_o);
    t.stats(c2) = stats(off - off_o, value(rng), off_o);
    const auto rel = [&] {
      return wu_uct_score(t.stats(t.root()), t.stats(c), b) -
             wu_uct_score(t.stats(t.root()), t.stats(c2), b);
    };
    const double before = rel();
    incomplete_update(t, PathRecord{{t.root(), c}, 0});
    if (!(rel() < before)) ++mono_fail;

    // Penalty from k unobserved samples at parent and child shrinks with N.
    const std::uint64_t k = 1 + rng() % 64;
    const std::uint64_t n = log_uniform(rng, 20, 1e6);
    const double v = value(rng);
    const auto gap = [&](std::uint64_t visits) {
      return std::abs(wu_uct_score(stats(visits, 0.0, k), stats(visits, v, k), b) -
                      uct_score(stats(visits, 0.0), stats(visits, v), b));
    };
    if (!(gap(10 * n) < gap(n))) ++vanish_fail;
  }
  const double g = std::abs(wu_uct_score(stats(1000000, 0.0, 16), stats(1000000, 0.5, 16), 1.0) -
                            uct_score(stats(1000000, 0.0), stats(1000000, 0.5), 1.0));
  std::ostringstream d;
  d << "monotonicity violations " << mono_fail << ", vanishing violations " << vanish_fail
    << " over 10^5 tuples; gap at N=10^6, k=16 is " << g;
  return {mono_fail == 0 && vanish_fail == 0 && g < 1e-3, d.str()};
}

Outcome occupancy() {
  const DelayWrapper env(std::make_unique<SyntheticTreeEnv>(4, 50, 3), std::chrono::milliseconds(1));
  SearchSettings s;
  s.t_max = 512;
  s.n_exp = 1;
  s.policy.rng_seed = 5;
  std::ostringstream d;
  bool pass = true;
  d << "simulation occupancy";
  for (std::uint32_t n : {4u, 8u, 16u}) {
    s.n_sim = n;
    const PlanResult r = wu_uct_plan(env, env.initial_state(), s);
    d << " " << n << ":" << r.report.occupancy.simulation;
    if (!(r.report.occupancy.simulation >= 0.90)) pass = false;
  }
  d << " (floor 0.90, target 0.95)";
  return {pass, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "sequential equivalence", sequential_equivalence},
      {2, "score formulas", score_formulas},
      {3, "statistic conservation", conservation},
      {4, "near-linear speedup", speedup},
      {5, "performance retention", performance_retention},
      {6, "collapse of exploration", collapse},
      {7, "score properties", score_properties},
      {8, "simulation occupancy", occupancy},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.contains(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
