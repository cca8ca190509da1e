#include <doctest.h>

#include "evsched/errors.hpp"
#include "evsched/state.hpp"
#include "fixtures.hpp"

using namespace evsched;

TEST_CASE("waiting time examples") {
  const ChargerPool pool{5, 1.0, 1.0};
  CHECK(std::abs(waiting_time(pool, 0, 0) - 1.0) < 1e-9);
  CHECK(std::abs(waiting_time(pool, 2, 2) - 5.0) < 1e-9);
  CHECK(std::abs(waiting_time(ChargerPool{5, 1.0, 0.0}, 3, 0) - 0.0) < 1e-9);
  CHECK(waiting_time(pool, 3, 2) == kDefaultMaxWait);
  CHECK(waiting_time(pool, 5, 4) == kDefaultMaxWait);
  CHECK(waiting_time(pool, 5, 0, 77.0) == 77.0);
  CHECK_THROWS_AS(waiting_time(ChargerPool{0, 1.0, 1.0}, 0, 0), ValidationError);
}

TEST_CASE("waiting time is nondecreasing in load") {
  Rng rng(2024);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const ChargerPool pool{1 + static_cast<int>(uniform01(rng) * 20), 0.01 + 3.0 * uniform01(rng),
                           uniform01(rng)};
    const int load = static_cast<int>(uniform01(rng) * (pool.capacity + 2));
    if (waiting_time(pool, load, 0) > waiting_time(pool, load + 1, 0)) ++violations;
    if (waiting_time(pool, load, 0) != waiting_time(pool, 0, load)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("empty transition only moves the clock") {
  const Network net = fixtures::line_network({{2, 1}, {3, 0}});
  const SystemState s = initial_state(net, 0, 4, {}, {1, 0, 0, 0});
  const SystemState n = advance(net, s, {}, ExogenousInfo{});
  CHECK(n.t == 1);
  CHECK(n.available == s.available);
  CHECK(n.occupancy == s.occupancy);
  CHECK(n.new_spots == std::vector<int>(4, 0));
  check_spot_conservation(net, n);
}

TEST_CASE("fast commitment at nominal rate adds 2 pi") {
  const Network net = fixtures::line_network({{1, 1}});
  const auto u = fixtures::user(1, 10.0, 30.0, 3);
  const SystemState s = initial_state(net, 0, 4, {u});
  const std::vector<Action> acts{Action::charge(1, pool_index(0, kFast), 2)};
  const SystemState n = advance(net, s, acts, nominal_exogenous(s, acts, 6.2));
  REQUIRE(n.find_user(1));
  CHECK(n.find_user(1)->soc == doctest::Approx(22.4).epsilon(1e-12));
  CHECK(n.committed(1));
  CHECK(n.commitments.at(1).remaining == 1);
  CHECK(n.occupancy[pool_index(0, kFast)] == 1);

  const auto m = advance(net, n, {}, nominal_exogenous(n, {}, 6.2));
  CHECK_FALSE(m.find_user(1));
  CHECK(m.departed.at(0).soc == doctest::Approx(34.8));
  CHECK(m.new_spots[pool_index(0, kFast)] == 1);
  check_spot_conservation(net, m);
}

TEST_CASE("a departure frees its spot into the next period") {
  const Network net = fixtures::line_network({{4, 0}});
  const PoolIndex p = pool_index(0, kSlow);
  SystemState s = initial_state(net, 0, 5, {fixtures::user(1, 5, 40, 3), fixtures::user(2, 5, 40, 3),
                                             fixtures::user(3, 5, 40, 3)});
  std::vector<Action> acts{Action::charge(1, p, 1), Action::charge(2, p, 2), Action::charge(3, p, 2)};
  s = advance(net, s, acts, nominal_exogenous(s, acts, 6.2));
  CHECK(s.occupancy[p] == 2);
  CHECK(s.new_spots[p] == 1);
  CHECK(s.free_spots(p) == 2);
  check_spot_conservation(net, s);
}

TEST_CASE("advance rejects broken joint actions") {
  const Network net = fixtures::line_network({{1, 0}});
  const PoolIndex p = pool_index(0, kSlow);
  const SystemState s =
      initial_state(net, 0, 3, {fixtures::user(1, 5, 20, 2), fixtures::user(2, 5, 20, 2)});
  std::vector<Action> two{Action::charge(1, p, 1), Action::charge(2, p, 1)};
  CHECK_THROWS_AS(advance(net, s, two, nominal_exogenous(s, two, 6.2)), ContractViolation);
  std::vector<Action> dup{Action::charge(1, p, 1), Action::skip(1)};
  CHECK_THROWS_AS(advance(net, s, dup, ExogenousInfo{}), ContractViolation);
  std::vector<Action> ghost{Action::skip(9)};
  CHECK_THROWS_AS(advance(net, s, ghost, ExogenousInfo{}), ContractViolation);
  std::vector<Action> one{Action::charge(1, p, 1)};
  CHECK_THROWS_AS(advance(net, s, one, ExogenousInfo{}), ContractViolation);
}

TEST_CASE("random transitions conserve spots and keep SOC monotone and capped") {
  const Network net = fixtures::line_network({{2, 1}, {1, 2}});
  Rng rng(77);
  for (int run = 0; run < 200; ++run) {
    std::vector<EvUser> users;
    for (int i = 0; i < 6; ++i)
      users.push_back(fixtures::user(i + 1, 40.0 * uniform01(rng), 45.0,
                                     1 + static_cast<int>(uniform01(rng) * 4)));
    SystemState s = initial_state(net, 0, 6, users);
    for (int t = 0; t < 6; ++t) {
      std::vector<Action> acts;
      std::vector<int> used(net.pool_count(), 0);
      for (const EvUser* u : s.uncommitted_users()) {
        const double r = uniform01(rng);
        if (r < 0.2) {
          acts.push_back(Action::skip(u->id));
          continue;
        }
        const PoolIndex p = static_cast<PoolIndex>(uniform01(rng) * net.pool_count());
        if (r < 0.7 && used[p] < s.free_spots(p)) {
          ++used[p];
          acts.push_back(Action::charge(u->id, p, 1 + static_cast<int>(uniform01(rng) * 3)));
        }
      }
      ExogenousInfo exo;
      for (const auto& [id, p] : charging_users(s, acts))
        exo.delivered[{id, s.t}] = 15.0 * uniform01(rng);
      const SystemState n = advance(net, s, acts, exo);
      check_spot_conservation(net, n);
      for (PoolIndex p = 0; p < net.pool_count(); ++p)
        REQUIRE(n.occupancy[p] + n.free_spots(p) == net.pool(p).capacity);
      for (const auto& [id, c] : s.commitments) {
        const EvUser* before = s.find_user(id);
        const EvUser* after = n.find_user(id);
        const EvUser* gone = nullptr;
        for (const auto& d : n.departed)
          if (d.id == id) gone = &d;
        const EvUser* now = after ? after : gone;
        REQUIRE(now);
        CHECK(now->soc >= before->soc);
        CHECK(now->soc <= now->battery_capacity);
      }
      s = n;
    }
  }
}
