#include <doctest.h>

#include <set>

#include "evsched/demand.hpp"
#include "evsched/errors.hpp"
#include "evsched/scenario.hpp"
#include "fixtures.hpp"

using namespace evsched;

namespace {

DemandProfile five_bands() {
  DemandProfile p;
  p.bands = {{0, 2, 20}, {3, 6, 25}, {7, 11, 20}, {12, 15, 15}, {16, 18, 30}};
  return p;
}

}  // namespace

TEST_CASE("AM-peak arrivals average 25 per period") {
  const Network net = fixtures::line_network({{}});
  DemandGenerator gen(five_bands());
  Rng rng = make_stream(42, "demand");
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(gen.generate_arrivals(net, 4, rng).size());
  CHECK(std::abs(sum / draws - 25.0) / 25.0 < 0.05);
}

TEST_CASE("demand levels halve and double the rates") {
  ScenarioConfig cfg;
  cfg.demand = five_bands();
  cfg.level = DemandLevel::low;
  CHECK(cfg.effective_demand().arrival_rate(4) == 12.5);
  cfg.level = DemandLevel::high;
  CHECK(cfg.effective_demand().arrival_rate(4) == 50.0);
  cfg.level = DemandLevel::medium;
  CHECK(cfg.effective_demand().arrival_rate(17) == 30.0);
}

TEST_CASE("zero-rate band never produces arrivals") {
  const Network net = fixtures::line_network({{}});
  DemandProfile p;
  p.bands = {{0, 3, 0.0}};
  DemandGenerator gen(p);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(gen.generate_arrivals(net, i % 4, rng).empty());
}

TEST_CASE("required SOC from onward distance") {
  DemandProfile p;
  CHECK(required_soc(48.0, 50.0, p) == doctest::Approx(48.0 / 2.91 + 1.0).epsilon(1e-12));
  CHECK(required_soc(48.0, 50.0, p) == doctest::Approx(17.49).epsilon(1e-3));
  CHECK(required_soc(0.0, 50.0, p) == 1.0);
  CHECK(required_soc(500.0, 50.0, p) == 50.0);
}

TEST_CASE("generated users are well formed with unique ids") {
  const Network net = fixtures::line_network({{}});
  DemandGenerator gen(five_bands());
  Rng rng(8);
  std::set<int> ids;
  for (int t = 0; t < 19; ++t) {
    for (const auto& u : gen.generate_arrivals(net, t, rng)) {
      CHECK(ids.insert(u.id).second);
      CHECK(u.arrival_period == t);
      CHECK(u.soc >= 0.2 * 50.0);
      CHECK(u.soc <= 0.6 * 50.0);
      CHECK(u.parking_duration >= 1);
      CHECK(u.soc_threshold == doctest::Approx(20.0 / 2.91 + 1.0));
    }
  }
}

TEST_CASE("arrival stream is reproducible") {
  const Network net = fixtures::line_network({{}});
  DemandGenerator a(five_bands()), b(five_bands());
  Rng ra = make_stream(3, "demand"), rb = make_stream(3, "demand");
  for (int t = 0; t < 19; ++t) CHECK(a.generate_arrivals(net, t, ra) == b.generate_arrivals(net, t, rb));
}

TEST_CASE("bands must partition the horizon") {
  DemandProfile p;
  p.bands = {{0, 2, 1.0}, {4, 5, 1.0}};
  CHECK_THROWS_AS(p.validate(6), ValidationError);
  p.bands = {{0, 2, 1.0}, {3, 5, 1.0}};
  CHECK_NOTHROW(p.validate(6));
  CHECK_THROWS_AS(p.validate(7), ValidationError);
}
