#include <doctest.h>

#include <cmath>

#include "evsched/sh.hpp"

using namespace evsched;

TEST_CASE("rate sampling") {
  Rng rng(3);
  RateModel exact;
  exact.rel_sd = 0.0;
  for (int i = 0; i < 100; ++i) {
    CHECK(exact.sample(kSlow, rng) == 6.2);
    CHECK(exact.sample(kFast, rng) == 12.5);
  }

  RateModel noisy;
  for (int k : {kSlow, kFast}) {
    double sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) sum += noisy.sample(k, rng);
    CHECK(std::abs(sum / draws - noisy.mean[k]) < 0.01 * noisy.mean[k]);
  }

  RateModel wild;
  wild.rel_sd = 3.0;
  int zeros = 0;
  for (int i = 0; i < 1000; ++i) {
    const double r = wild.sample(kSlow, rng);
    CHECK(r >= 0.0);
    zeros += r == 0.0;
  }
  CHECK(zeros > 0);
}

TEST_CASE("rate paths have the requested length") {
  Rng rng(1);
  const RatePath p = sample_rate_path(RateModel{}, kFast, 4, rng, 7);
  CHECK(p.samples.size() == 4);
  CHECK(p.index == 7);
}

TEST_CASE("cone feasibility examples") {
  CHECK(cone_feasible(1.4, 2, 20.0, 6.2));
  CHECK_FALSE(cone_feasible(1.4, 1, 20.0, 6.2));
  CHECK(cone_feasible(25.0, 1, 20.0, 6.2));
  CHECK(cone_feasible(20.0, 3, 20.0, 6.2));
  CHECK_FALSE(cone_feasible(0.0, 4, 20.0, 6.2));
}

TEST_CASE("cone feasibility after nominal charging implies it before") {
  Rng rng(11);
  const double pi = 6.2;
  int hits = 0, violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const double b = 40.0 * uniform01(rng);
    const int psi = 1 + static_cast<int>(uniform01(rng) * 8);
    const int delta = static_cast<int>(uniform01(rng) * 6);
    const double rate = pi * (1.0 + static_cast<int>(uniform01(rng) * 2));
    const double later = b + rate * delta;
    const double q = later + psi * pi * (0.8 + 1.4 * uniform01(rng));
    if (!cone_feasible(later, psi, q, pi)) continue;
    ++hits;
    if (!cone_feasible(b, psi + delta, q, pi)) ++violations;
  }
  CHECK(violations == 0);
  CHECK(hits > 3000);
}

TEST_CASE("shooting examples") {
  const RateModel nominal = RateModel::nominal(6.2);
  Rng rng(5);
  const ShotResult r = shoot(10.0, 2, 20.0, kSlow, 30, nominal, 50.0, rng);
  CHECK(r.feasible);
  CHECK(r.survival == 1.0);
  REQUIRE(r.trajectory.size() == 2);
  CHECK(r.trajectory[0] == doctest::Approx(16.2).epsilon(1e-12));
  CHECK(r.trajectory[1] == doctest::Approx(22.4).epsilon(1e-12));

  const ShotResult miss = shoot(10.0, 2, 40.0, kSlow, 30, nominal, 50.0, rng);
  CHECK_FALSE(miss.feasible);
  CHECK(miss.survival == 0.0);
  CHECK(miss.trajectory.empty());

  const RateModel noisy;
  Rng a(8), b(8);
  const ShotResult one = shoot(10.0, 3, 0.0, kFast, 1, noisy, 50.0, a);
  const RatePath path = sample_rate_path(noisy, kFast, 3, b);
  double soc = 10.0;
  for (int tau = 0; tau < 3; ++tau) {
    soc += path.samples[tau];
    CHECK(one.trajectory[tau] == doctest::Approx(soc).epsilon(1e-12));
  }
}

TEST_CASE("shooting respects the battery cap") {
  Rng rng(2);
  const ShotResult r = shoot(45.0, 3, 46.0, kFast, 30, RateModel{}, 50.0, rng);
  for (double b : r.trajectory) CHECK(b <= 50.0);
}

TEST_CASE("surviving shots reach the threshold and trajectories are monotone") {
  Rng rng(21);
  const RateModel model;
  for (int i = 0; i < 2000; ++i) {
    const double b = 30.0 * uniform01(rng);
    const int n = 1 + static_cast<int>(uniform01(rng) * 5);
    const int k = uniform01(rng) < 0.5 ? kSlow : kFast;
    const double q = b + model.mean[k] * n * (0.8 + 0.4 * uniform01(rng));
    const ShotResult r = shoot(b, n, q, k, 30, model, 1e9, rng);
    if (!r.feasible) continue;
    CHECK(r.trajectory.back() >= q);
    for (std::size_t tau = 1; tau < r.trajectory.size(); ++tau)
      CHECK(r.trajectory[tau] >= r.trajectory[tau - 1]);
  }
}

TEST_CASE("a far threshold is out of reach at every rate and duration") {
  const RateModel nominal = RateModel::nominal(6.25);
  Rng rng(4);
  for (int psi = 1; psi <= 5; ++psi) {
    const double q = 10.0 + 12.5 * psi + 0.5;
    CHECK_FALSE(cone_feasible(10.0, psi, q, 6.25));
    for (int n = 1; n <= psi; ++n) {
      CHECK_FALSE(shoot(10.0, n, q, kSlow, 5, nominal, 1e9, rng).feasible);
      CHECK_FALSE(shoot(10.0, n, q, kFast, 5, nominal, 1e9, rng).feasible);
    }
    CHECK(shoot(10.0, psi, q - 0.5, kFast, 5, nominal, 1e9, rng).feasible);
  }
}

TEST_CASE("nominal trajectories stay inside the cone") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double b = 40.0 * uniform01(rng);
    const int n = 1 + static_cast<int>(uniform01(rng) * 8);
    const int k = uniform01(rng) < 0.5 ? kSlow : kFast;
    const ShotResult r = shoot(b, n, 0.0, k, 1, RateModel::nominal(6.2), 1e9, rng);
    const SocCone cone = SocCone::from(b, 6.2, n);
    CHECK(cone.lower(0) == cone.upper(0));
    for (int tau = 1; tau <= n; ++tau) CHECK(cone.contains(tau, r.trajectory[tau - 1]));
  }
}

TEST_CASE("shot value adds the miss surcharge") {
  ShotResult r;
  r.survival = 0.25;
  CHECK(shot_value(r, 3.0, 0.5, 0.2, 4) == doctest::Approx(3.5 + 0.75 * 0.8));
  r.survival = 1.0;
  CHECK(shot_value(r, 3.0, 0.5, 0.2, 4) == 3.5);
}
