#include <doctest.h>

#include "evsched/benchmark.hpp"
#include "evsched/gne.hpp"
#include "evsched/simulation.hpp"
#include "fixtures.hpp"

using namespace evsched;

TEST_CASE("fcfs queue keeps arrival order") {
  FcfsQueue q(2);
  q.push(1, 7);
  q.push(1, 3);
  q.push(0, 5);
  CHECK(q.head(1) == 7);
  CHECK(q.size(1) == 2);
  CHECK(q.contains(3));
  CHECK_THROWS_AS(q.push(0, 3), ContractViolation);
  q.pop(1);
  CHECK(q.head(1) == 3);
  CHECK_FALSE(q.contains(7));
  CHECK(q.line(0).size() == 1);
}

TEST_CASE("an uncontested user gets the same decision as consensus") {
  const Network net = fixtures::line_network({{1, 1, 0.5, 0.9, 2.0, 2.0}, {1, 0, 0.3, 1.0, 1.0, 5.0}});
  const std::vector<EvUser> users{fixtures::user(1, 4, 15, 2)};
  const SystemState s = initial_state(net, 0, 5, users);
  const CostWeights w;
  PriorityScheduler ps(net, w);
  const auto fcfs = ps.decide(s);
  const GneResult g = run_gne(net, s, users, w, GneConfig{});
  CHECK(fcfs == g.actions);
}

TEST_CASE("users wait in line and are served in arrival order") {
  const Network net = fixtures::line_network({{1, 0}});
  const CostWeights w;
  std::vector<EvUser> users{fixtures::user(1, 10, 15, 1), fixtures::user(2, 10, 15, 5),
                            fixtures::user(3, 10, 15, 5)};
  SystemState s = initial_state(net, 0, 6, users);
  PriorityScheduler ps(net, w);
  std::vector<int> order;
  for (int t = 0; t < 6; ++t) {
    const auto acts = ps.decide(s);
    for (const auto& a : acts)
      if (a.charges()) order.push_back(a.user);
    s = advance(net, s, acts, nominal_exogenous(s, acts, w.pi));
  }
  CHECK(order == std::vector<int>{1, 2, 3});
  CHECK(audit_queue_log(ps.log()).empty());
}

TEST_CASE("queue heads that cannot finish are dropped") {
  const Network net = fixtures::line_network({{1, 0}});
  const CostWeights w;
  std::vector<EvUser> users{fixtures::user(1, 0, 12, 2), fixtures::user(2, 0, 12, 2)};
  SystemState s = initial_state(net, 0, 3, users);
  PriorityScheduler ps(net, w);
  for (int t = 0; t < 3; ++t) {
    const auto acts = ps.decide(s);
    s = advance(net, s, acts, nominal_exogenous(s, acts, w.pi));
  }
  bool dropped = false;
  for (const auto& e : ps.log()) dropped |= e.user == 2 && e.kind == QueueEventKind::dropped;
  CHECK(dropped);
}

TEST_CASE("queue audit flags overtaking") {
  std::vector<QueueEvent> log{{0, 0, 1, QueueEventKind::enqueued},
                              {0, 0, 2, QueueEventKind::enqueued},
                              {1, 0, 2, QueueEventKind::served}};
  CHECK(audit_queue_log(log).size() == 1);
  log.push_back({1, 0, 3, QueueEventKind::served});
  CHECK(audit_queue_log(log).size() == 2);
}

TEST_CASE("priority runs keep capacity and queue discipline") {
  ScenarioConfig cfg = load_scenario(fixtures::preset("hypothetical.cfg"));
  for (auto level : {DemandLevel::low, DemandLevel::high}) {
    cfg.level = level;
    const RunReport r = run_scenario(cfg, RunMode::priority);
    CHECK(r.ok());
    const ModeReport* m = r.find("priority");
    REQUIRE(m);
    CHECK(m->evaluation.ok());
    CHECK(audit_queue_log(m->queue_log).empty());
  }
}

TEST_CASE("both modes see the same users") {
  ScenarioConfig cfg = load_scenario(fixtures::preset("hypothetical.cfg"));
  cfg.level = DemandLevel::low;
  cfg.mcts.iterations = 20;
  const RunReport r = run_scenario(cfg, RunMode::both);
  REQUIRE(r.find("consensus"));
  REQUIRE(r.find("priority"));
  CHECK(r.find("consensus")->users == r.find("priority")->users);
  CHECK(r.ok());
}
