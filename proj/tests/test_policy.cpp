#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracle.hpp"
#include "support.hpp"
#include "wuuct/errors.hpp"
#include "wuuct/policy.hpp"
#include "wuuct/synthetic_tree_env.hpp"
#include "wuuct/tile_puzzle_env.hpp"

using namespace wuuct;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Leaf rewards of SyntheticTreeEnv(b=2, d=2, seed=7), from an independent
// SplitMix64 implementation.
constexpr double kLeafD2[2][2] = {{0.7771544305516648, 0.9277222541655719},
                                  {0.3552038711753437, 0.8950207119255708}};

NodeStats stats(std::uint64_t n, double v, std::uint64_t o = 0) {
  NodeStats s;
  s.visits = n;
  s.value = v;
  s.unobserved = o;
  return s;
}

PolicyConfig cfg_with(double stop = 0.5, std::uint64_t seed = 0) {
  PolicyConfig c;
  c.expand_stop_prob = stop;
  c.rng_seed = seed;
  return c;
}

}  // namespace

TEST_CASE("uct score") {
  CHECK(uct_score(stats(4, 0), stats(0, 0.3), 1.0) == kInf);
  const double s = uct_score(stats(4, 0), stats(1, 0.5), 1.0);
  CHECK(s == doctest::Approx(2.16511).epsilon(1e-5));
  CHECK(testing::relative_error(s, testing::oracle_uct(stats(4, 0), stats(1, 0.5), 1.0)) < 1e-15);
  CHECK(uct_score(stats(9, 0), stats(3, 0.375), 0.0) == 0.375);
}

TEST_CASE("wu-uct score") {
  const double s = wu_uct_score(stats(4, 0, 2), stats(1, 0.5, 1), 1.0);
  CHECK(s == doctest::Approx(1.83857).epsilon(1e-5));
  CHECK(testing::relative_error(s, testing::oracle_wu_uct(stats(4, 0, 2), stats(1, 0.5, 1), 1.0)) <
        1e-15);
  CHECK(wu_uct_score(stats(4, 0, 2), stats(0, 0.5, 0), 1.0) == kInf);
  CHECK(wu_uct_score(stats(4, 0, 0), stats(0, 0.5, 1), 1.0) < kInf);
  CHECK(wu_uct_score(stats(7, 0), stats(3, 0.1), 1.3) == uct_score(stats(7, 0), stats(3, 0.1), 1.3));
}

TEST_CASE("pseudo-count value") {
  CHECK(treep_pseudocount_value(stats(4, 1.0), 1.0, 1.0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(treep_pseudocount_value(stats(5, 0.7), 0.0, 0.0) == 0.7);
  CHECK(treep_pseudocount_value(stats(0, 0.0), 1.0, 1.0) == -1.0);
  CHECK_THROWS_AS(treep_pseudocount_value(stats(0, 0.0), 1.0, 0.0), DivisionByZero);
}

TEST_CASE("virtual-loss scores read O as applied losses") {
  const NodeStats parent = stats(10, 0);
  const NodeStats child = stats(4, 1.0, 1);
  const double plain = uct_score(parent, stats(4, 0.6), 1.0);
  CHECK(selection_score(ScoreMode::pseudo_count(1.0, 1.0), parent, child, 1.0) ==
        doctest::Approx(uct_score(parent, stats(4, 0.6), 1.0)).epsilon(1e-15));
  CHECK(plain > 0.0);
  CHECK(selection_score(ScoreMode::virtual_loss(0.25), parent, stats(4, 1.0, 2), 1.0) ==
        uct_score(parent, stats(4, 0.5), 1.0));
  CHECK(selection_score(ScoreMode::virtual_loss(0.0), parent, child, 1.0) ==
        uct_score(parent, child, 1.0));
  CHECK(selection_score(ScoreMode::virtual_loss(1.0), parent, stats(0, 0, 3), 1.0) == kInf);
}

TEST_CASE("selection stops at a childless root") {
  SearchTree t(3, TreeLimits{});
  Rng rng(1);
  const Selection s = select_path(t, ScoreMode::uct(), cfg_with(), rng);
  CHECK(s.path.nodes == std::vector<NodeId>{t.root()});
  CHECK(s.reason == StopReason::kExpand);
}

TEST_CASE("selection follows the best score") {
  SearchTree t(2, TreeLimits{});
  const NodeId a = t.expand_attach(t.root(), ActionId{0}, 0.0, false);
  const NodeId b = t.expand_attach(t.root(), ActionId{1}, 0.0, false);
  t.stats(t.root()).visits = 4;
  t.stats(a).visits = 1;
  t.stats(a).value = 0.5;   // 2.16511
  t.stats(b).visits = 3;
  t.stats(b).value = -0.06;  // about 0.9
  CHECK(uct_score(t.stats(t.root()), t.stats(b), 1.0) == doctest::Approx(0.9).epsilon(0.01));
  Rng rng(1);
  const Selection s = select_path(t, ScoreMode::uct(), cfg_with(), rng);
  CHECK(s.path.nodes == std::vector<NodeId>{t.root(), a});
  CHECK(s.reason == StopReason::kExpand);
}

TEST_CASE("selection breaks ties toward the lowest action") {
  SearchTree t(3, TreeLimits{});
  const NodeId hi = t.expand_attach(t.root(), ActionId{2}, 0.0, false);
  const NodeId lo = t.expand_attach(t.root(), ActionId{1}, 0.0, false);
  const NodeId mid = t.expand_attach(t.root(), ActionId{0}, 0.0, false);
  t.stats(t.root()).visits = 6;
  for (NodeId id : {hi, lo, mid}) {
    t.stats(id).visits = 2;
    t.stats(id).value = 0.25;
  }
  t.stats(mid).value = 0.1;
  Rng rng(3);
  const Selection s = select_path(t, ScoreMode::uct(), cfg_with(), rng);
  CHECK(s.path.nodes.at(1) == lo);
}

TEST_CASE("selection stop rules") {
  SUBCASE("terminal node") {
    SearchTree t(2, TreeLimits{}, RootInfo{0, 0.0, true});
    Rng rng(1);
    CHECK(select_path(t, ScoreMode::uct(), cfg_with(), rng).reason == StopReason::kTerminal);
  }
  SUBCASE("depth beyond the limit") {
    SearchTree t(2, TreeLimits{0, 20});
    const NodeId c = t.expand_attach(t.root(), ActionId{0}, 0.0, false);
    t.expand_attach(c, ActionId{0}, 0.0, false);
    t.stats(t.root()).visits = 1;
    t.stats(c).visits = 1;
    Rng rng(1);
    const Selection s = select_path(t, ScoreMode::uct(), cfg_with(0.0), rng);
    CHECK(s.path.nodes == std::vector<NodeId>{t.root(), c});
    CHECK(s.reason == StopReason::kSimulate);
  }
  SUBCASE("expansion probability one stops at the first expandable node") {
    SearchTree t(3, TreeLimits{});
    const NodeId c = t.expand_attach(t.root(), ActionId{0}, 0.0, false);
    t.stats(t.root()).visits = 1;
    t.stats(c).visits = 1;
    Rng rng(1);
    const Selection s = select_path(t, ScoreMode::uct(), cfg_with(1.0), rng);
    CHECK(s.path.nodes.size() == 1);
    CHECK(s.reason == StopReason::kExpand);
  }
  SUBCASE("expansion probability zero descends") {
    SearchTree t(3, TreeLimits{});
    const NodeId c = t.expand_attach(t.root(), ActionId{0}, 0.0, false);
    t.stats(t.root()).visits = 1;
    t.stats(c).visits = 1;
    Rng rng(1);
    const Selection s = select_path(t, ScoreMode::uct(), cfg_with(0.0), rng);
    CHECK(s.path.nodes.size() == 2);
    CHECK(s.reason == StopReason::kExpand);
  }
  SUBCASE("childless node with every action claimed is simulated") {
    SearchTree t(2, TreeLimits{});
    t.claim_action(t.root(), ActionId{0});
    t.claim_action(t.root(), ActionId{1});
    Rng rng(1);
    CHECK(select_path(t, ScoreMode::uct(), cfg_with(), rng).reason == StopReason::kSimulate);
  }
}

TEST_CASE("expansion draws among unexpanded actions") {
  SearchTree t(5, TreeLimits{});
  t.claim_action(t.root(), ActionId{1});
  t.expand_attach(t.root(), ActionId{3}, 0.0, false);
  Rng rng(9);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 3000; ++i) hits[choose_expansion_action(t, t.root(), rng).value]++;
  CHECK(hits[1] == 0);
  CHECK(hits[3] == 0);
  for (int a : {0, 2, 4}) CHECK(hits[a] > 800);
  SearchTree full(1, TreeLimits{});
  full.claim_action(full.root(), ActionId{0});
  CHECK_THROWS_AS(choose_expansion_action(full, full.root(), rng), ContractViolation);
}

TEST_CASE("rollout on a one-step episode") {
  TilePuzzleEnv env({2, 2, 2, 3, 4, 0}, {1, 1, 1, 1});
  PolicyConfig c;
  c.gamma = 0.99;
  Rng rng(5);
  CHECK(rollout(env, env.initial_state(), c, rng) == 1.0);
}

TEST_CASE("rollout replays the seeded action sequence") {
  SyntheticTreeEnv env(2, 2, 7);
  PolicyConfig c;
  c.gamma = 0.9;
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 1234567ULL}) {
    std::mt19937_64 replay(seed);
    const auto draw = [&] { return static_cast<int>(static_cast<double>(replay() >> 11) * 0x1.0p-53 * 2.0); };
    const int a0 = draw();
    const int a1 = draw();
    Rng rng(seed);
    CHECK(rollout(env, env.initial_state(), c, rng) == 0.9 * kLeafD2[a0][a1]);
  }
}

TEST_CASE("rollout horizon, bootstrap and blend") {
  SyntheticTreeEnv env(3, 6, 2);
  PolicyConfig c;
  c.gamma = 0.8;
  Rng r1(7);
  const double pure = rollout(env, env.initial_state(), c, r1);

  c.value_estimator = [](const Environment&, const State&) { return 0.0; };
  c.value_blend = 0.5;
  Rng r2(7);
  CHECK(rollout(env, env.initial_state(), c, r2) == 0.5 * pure);

  // Horizon 2 never reaches a reward at depth 6; only the bootstrap pays.
  PolicyConfig h;
  h.gamma = 0.8;
  h.rollout_horizon = 2;
  Rng r3(7);
  CHECK(rollout(env, env.initial_state(), h, r3) == 0.0);
  h.value_estimator = [](const Environment&, const State&) { return 1.0; };
  Rng r4(7);
  CHECK(rollout(env, env.initial_state(), h, r4) == doctest::Approx(0.64).epsilon(1e-15));
  h.value_blend = 0.25;
  Rng r5(7);
  CHECK(rollout(env, env.initial_state(), h, r5) ==
        doctest::Approx(0.75 * 0.64 + 0.25).epsilon(1e-15));

  SyntheticTreeEnv leafy(2, 1, 7);
  const State leaf = leafy.step(leafy.initial_state(), ActionId{0}).next_state;
  Rng r6(1);
  CHECK_THROWS_AS(rollout(leafy, leaf, c, r6), ContractViolation);
}

TEST_CASE("policy config ranges") {
  PolicyConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = [](auto mutate) {
    PolicyConfig x;
    mutate(x);
    CHECK_THROWS_AS(x.validate(), ConfigError);
  };
  bad([](PolicyConfig& x) { x.beta = 0.0; });
  bad([](PolicyConfig& x) { x.gamma = 0.0; });
  bad([](PolicyConfig& x) { x.gamma = 1.01; });
  bad([](PolicyConfig& x) { x.expand_stop_prob = -0.1; });
  bad([](PolicyConfig& x) { x.rollout_horizon = 0; });
  bad([](PolicyConfig& x) { x.value_blend = 1.5; });
}

TEST_CASE("wu-uct reduces to uct without unobserved samples") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> v(-5.0, 5.0);
  std::uniform_real_distribution<double> b(0.01, 4.0);
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t child = rng() % 1000;
    const std::uint64_t parent = std::max<std::uint64_t>(1, child + rng() % 1000);
    const NodeStats p = stats(parent, v(rng));
    const NodeStats c = stats(child, v(rng));
    const double beta = b(rng);
    const double x = wu_uct_score(p, c, beta);
    const double y = uct_score(p, c, beta);
    if (x != y) FAIL("mismatch at sample " << i);
  }
}

TEST_CASE("scores stay finite once counted") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t cn = rng() % 50;
    const std::uint64_t co = (cn == 0 ? 1 : 0) + rng() % 5;
    const NodeStats p = stats(cn + rng() % 50, 0.1, co + rng() % 5);
    const NodeStats c = stats(cn, 0.3, co);
    const double s = wu_uct_score(p, c, 1.0);
    if (!std::isfinite(s)) FAIL("non-finite score at sample " << i);
  }
}

TEST_CASE("selection is a pure function of seed and tree") {
  SyntheticTreeEnv env(4, 6, 5);
  SearchTree t(4, TreeLimits{});
  // Grow a tree by hand with a few visits.
  Rng grow(3);
  for (int i = 0; i < 60; ++i) {
    Selection s = select_path(t, ScoreMode::uct(), cfg_with(), grow);
    if (s.reason == StopReason::kExpand) {
      const NodeId n = s.path.nodes.back();
      s.path.nodes.push_back(t.expand_attach(n, choose_expansion_action(t, n, grow), 0.0, false));
    }
    backpropagate(t, s.path, static_cast<double>(i % 3), 0.9);
  }
  Rng first_rng(99);
  const Selection first = select_path(t, ScoreMode::wu_uct(), cfg_with(), first_rng);
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(99);
    const Selection again = select_path(t, ScoreMode::wu_uct(), cfg_with(), rng);
    CHECK(again.path.nodes == first.path.nodes);
    CHECK(again.reason == first.reason);
  }
}
