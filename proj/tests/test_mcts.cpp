#include <doctest.h>

#include "evsched/gne.hpp"
#include "evsched/mcts.hpp"
#include "evsched/oracle.hpp"
#include "fixtures.hpp"

using namespace evsched;

namespace {

MctsConfig config(int iterations, int horizon, int expansion) {
  MctsConfig c;
  c.iterations = iterations;
  c.horizon = horizon;
  c.expansion = expansion;
  return c;
}

}  // namespace

TEST_CASE("uct selection examples") {
  const std::vector<ActionStats> costs{{5.0, 0.0, 10}, {3.0, 0.0, 10}};
  CHECK(uct_select(costs, 20, 1.0) == 1);
  const std::vector<ActionStats> counts{{2.0, 1.0, 1}, {2.0, 1.0, 100}};
  CHECK(uct_select(counts, 101, 1.0) == 0);
  const std::vector<ActionStats> greedy{{2.0, 1.0, 1}, {1.0, 1.5, 100}, {2.0, 1.0, 3}};
  CHECK(uct_select(greedy, 104, 0.0) == 1);
  const std::vector<ActionStats> tie{{1.0, 1.0, 5}, {2.0, 0.0, 5}};
  CHECK(uct_select(tie, 10, 1.0) == 0);
  CHECK_THROWS_AS(uct_select(std::vector<ActionStats>{}, 1, 1.0), ContractViolation);
}

TEST_CASE("backpropagation keeps running means") {
  TreeNode a, b;
  std::vector<TreeNode*> path{&a};
  backpropagate(path, {}, 4.0);
  CHECK(a.value == 4.0);
  CHECK(a.visits == 1);
  backpropagate(path, {}, 8.0);
  CHECK(a.value == 6.0);
  CHECK(a.visits == 2);

  std::vector<TreeNode*> two{&a, &b};
  const std::vector<double> edge{1.0};
  backpropagate(two, edge, 4.0);
  CHECK(b.value == 4.0);
  CHECK(a.value == doctest::Approx((4.0 + 8.0 + 5.0) / 3.0));

  backpropagate(std::span<TreeNode*>{}, {}, 9.0);
  CHECK(a.visits == 3);
}

TEST_CASE("expansion exhausts the admissible set") {
  const Network net = fixtures::line_network({{1, 0}});
  const SystemState s = initial_state(net, 0, 3, {fixtures::user(1, 5, 15, 3)});
  const CostWeights w;
  const RateModel rates = RateModel::nominal(w.pi);

  SearchTree three(net, w, rates, config(10, 2, 3), s, {}, 1);
  CHECK(three.root().unexplored.size() == 3);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(three.can_expand(0));
    three.expand(0);
  }
  CHECK_FALSE(three.can_expand(0));
  CHECK(three.root().unexplored.empty());
  CHECK(three.root().explored.size() == 3);
  CHECK_THROWS_AS(three.expand(0), ContractViolation);

  SearchTree one(net, w, rates, config(10, 2, 1), s, {}, 1);
  one.expand(0);
  CHECK_FALSE(one.can_expand(0));
  CHECK(one.root().unexplored.size() == 2);
}

TEST_CASE("full pools are not admissible") {
  const Network net = fixtures::line_network({{1, 1}});
  const SystemState s =
      initial_state(net, 0, 3, {fixtures::user(1, 5, 15, 3)}, {1, 0});
  SearchTree tree(net, CostWeights{}, RateModel{}, config(10, 2, 8), s, {}, 1);
  for (const auto& c : tree.admissible(tree.root()))
    if (c.pool) CHECK(*c.pool == pool_index(0, kFast));
}

TEST_CASE("the hint is expanded first") {
  const Network net = fixtures::line_network({{1, 1}});
  const SystemState s = initial_state(net, 0, 4, {fixtures::user(1, 5, 15, 3)});
  const Action hint = Action::charge(1, pool_index(0, kSlow), 3);
  SearchTree tree(net, CostWeights{}, RateModel{}, config(10, 2, 8), s, {hint}, 1);
  tree.expand(0);
  CHECK(tree.root().explored.front().choice == TreeChoice{hint.pool, hint.duration});
}

TEST_CASE("outcome sampling") {
  const Network net = fixtures::line_network({{1, 1}});
  const SystemState s = initial_state(net, 0, 4, {fixtures::user(1, 5, 15, 3)});
  const Action hint = Action::charge(1, pool_index(0, kFast), 2);

  SearchTree fixed(net, CostWeights{}, RateModel::nominal(6.2), config(10, 3, 8), s, {hint}, 1);
  const std::size_t e1 = fixed.expand(0);
  const std::size_t post = fixed.root().explored[e1].child;
  REQUIRE(fixed.node(post).kind == NodeKind::post_decision);
  const std::size_t first = fixed.sample_outcome(post);
  for (int i = 0; i < 20; ++i) CHECK(fixed.sample_outcome(post) == first);
  CHECK(fixed.node(post).outcomes.size() == 1);
  CHECK(fixed.node(first).depth == 1);

  SearchTree noisy(net, CostWeights{}, RateModel{}, config(10, 3, 8), s, {hint}, 1);
  const std::size_t e2 = noisy.expand(0);
  const std::size_t p2 = noisy.root().explored[e2].child;
  for (int i = 0; i < 20; ++i) noisy.sample_outcome(p2);
  CHECK(noisy.node(p2).outcomes.size() >= 2);
  CHECK_THROWS_AS(noisy.sample_outcome(0), ContractViolation);
}

TEST_CASE("tree depth never exceeds the horizon") {
  const Network net = fixtures::line_network({{1, 1}, {2, 0}});
  std::vector<EvUser> users;
  for (int i = 1; i <= 4; ++i) users.push_back(fixtures::user(i, 2.0 * i, 20, 4));
  const SystemState s = initial_state(net, 0, 8, users);
  for (int h : {1, 2, 3}) {
    SearchTree tree(net, CostWeights{}, RateModel{}, config(300, h, 4), s, {}, 9);
    tree.run(300);
    CHECK(tree.root().visits == 300);
    for (std::size_t i = 0; i < tree.size(); ++i) CHECK(tree.node(i).depth <= h);
    int sum = 0;
    for (const auto& e : tree.root().explored) sum += tree.node(e.child).visits;
    CHECK(sum == tree.root().visits);
  }
}

TEST_CASE("forced moves") {
  const Network net = fixtures::line_network({{1, 0}});
  const SystemState done = initial_state(net, 0, 3, {fixtures::user(1, 30, 15, 2)});
  const SystemState blocked = initial_state(net, 0, 3, {fixtures::user(2, 5, 15, 2)}, {1, 0});
  for (int n : {1, 50}) {
    const auto a = run_mcts(net, done, CostWeights{}, RateModel{}, config(n, 2, 8), {}, 3);
    REQUIRE(a.actions.size() == 1);
    CHECK_FALSE(a.actions[0].charges());
    const auto b = run_mcts(net, blocked, CostWeights{}, RateModel{}, config(n, 2, 8), {}, 3);
    CHECK(b.actions.empty());
  }
}

TEST_CASE("one user, two lots: the tree agrees with enumeration") {
  MicroScenario ms;
  ms.net = fixtures::line_network({{1, 1, 1.0, 2.0, 2.0, 2.0}, {1, 1, 0.2, 3.0, 6.0, 6.0}});
  ms.users = {fixtures::user(1, 5, 15, 2)};
  ms.horizon = 2;
  const CostWeights w;
  const OracleResult best = brute_force(ms, w);
  REQUIRE(best.feasible);
  REQUIRE(best.schedule.at(0).start == 0);
  const SystemState s = initial_state(ms.net, 0, ms.horizon, ms.users);
  const auto r = run_mcts(ms.net, s, w, RateModel::nominal(w.pi), config(2000, 2, 16), {}, 17);
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].pool == best.schedule[0].pool);
  CHECK(r.actions[0].duration == best.schedule[0].duration);
  CHECK(r.lower_bound <= best.total + 1e-12);
}

TEST_CASE("fast charging wins when slow charging risks the deadline") {
  const Network net = fixtures::line_network({{1, 1, 1.0, 1.5}});
  CostWeights w;
  w.alpha_over = 5.0;
  const SystemState s = initial_state(net, 0, 2, {fixtures::user(1, 0.0, 12.3, 2)});
  int fast = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = run_mcts(net, s, w, RateModel{}, config(1000, 2, 8), {}, seed);
    if (r.actions.size() == 1 && r.actions[0].pool == pool_index(0, kFast)) ++fast;
  }
  CHECK(fast > 45);
}

TEST_CASE("lower bound examples") {
  const Network net = fixtures::line_network({{1, 1, 0.4, 0.9}, {1, 0, 0.5, 1.0, 3.0, 1.0}});
  const CostWeights w;
  const std::vector<EvUser> charged{fixtures::user(1, 30, 15, 2), fixtures::user(2, 16, 15, 2)};
  CHECK(lower_bound_value(net, initial_state(net, 0, 4, charged), charged, w) == 0.0);

  const std::vector<EvUser> solo{fixtures::user(1, 4, 15, 3)};
  const SystemState s = initial_state(net, 0, 4, solo);
  const std::vector<int> none(net.pool_count(), 0);
  const auto br = best_response(net, solo[0], s, none, w, MultiplierView{{}, 1.0});
  REQUIRE(br);
  CHECK(lower_bound_value(net, s, solo, w) ==
        doctest::Approx(penalized_cost(net, solo[0], *br, s, none, w, {{}, 1.0})));

  MicroScenario ms;
  ms.net = fixtures::line_network({{1, 0}});
  ms.users = {fixtures::user(1, 5, 15, 2), fixtures::user(2, 6, 15, 2)};
  ms.horizon = 2;
  const OracleResult best = brute_force(ms, w);
  const double bound = lower_bound_value(ms.net, initial_state(ms.net, 0, 2, ms.users), ms.users, w);
  CHECK(bound < best.total);
}

TEST_CASE("run_mcts is reproducible and independent of threads") {
  const Network net = fixtures::line_network({{2, 1}, {1, 1, 0.5, 1.0, 3.0, 2.0}});
  std::vector<EvUser> users;
  for (int i = 1; i <= 5; ++i) users.push_back(fixtures::user(i, 3.0 * i, 20, 3));
  const SystemState s = initial_state(net, 0, 6, users);
  const CostWeights w;
  const GneResult g = run_gne(net, s, users, w, GneConfig{});
  MctsConfig c = config(120, 3, 6);
  c.trees = 3;
  const auto a = run_mcts(net, s, w, RateModel{}, c, g.actions, 42);
  const auto b = run_mcts(net, s, w, RateModel{}, c, g.actions, 42);
  c.workers = 3;
  const auto d = run_mcts(net, s, w, RateModel{}, c, g.actions, 42);
  CHECK(a.root_visits == 120);
  CHECK(a.actions == b.actions);
  CHECK(a.actions == d.actions);
  CHECK(a.value == d.value);
  std::vector<int> used(net.pool_count(), 0);
  for (const auto& act : a.actions)
    if (act.pool) ++used[*act.pool];
  for (PoolIndex p = 0; p < used.size(); ++p) CHECK(used[p] <= s.free_spots(p));
}
