#include "evsched/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "evsched/errors.hpp"

namespace evsched {

void MicroScenario::validate() const {
  if (users.size() > kMaxUsers)
    throw ValidationError("micro scenario allows at most 4 users, got " +
                          std::to_string(users.size()));
  if (net.facilities.size() > kMaxFacilities)
    throw ValidationError("micro scenario allows at most 3 facilities, got " +
                          std::to_string(net.facilities.size()));
  if (horizon < 1 || horizon > kMaxHorizon)
    throw ValidationError("micro scenario horizon must be in [1, 4], got " +
                          std::to_string(horizon));
  if (!background.empty() && background.size() != net.pool_count())
    throw ValidationError("micro scenario background must have one entry per pool");
  net.validate(horizon);
}

std::vector<Assignment> service_options(const Network& net, const EvUser& u, int horizon,
                                        const CostWeights& w) {
  std::vector<Assignment> out;
  if (!u.needs_charge()) return {Assignment{u.id, u.arrival_period, std::nullopt, 0}};
  for (int s = std::max(0, u.arrival_period); s < horizon; ++s)
    for (PoolIndex p = 0; p < net.pool_count(); ++p) {
      if (net.pool(p).capacity <= 0) continue;
      const DurationRange r = duration_range(u, pool_type(p), s, horizon, w.pi);
      for (int n = r.min; n <= r.max; ++n) out.push_back(Assignment{u.id, s, p, n});
    }
  out.push_back(Assignment{u.id, u.arrival_period, std::nullopt, 0});
  return out;
}

OracleResult brute_force(const MicroScenario& ms, const CostWeights& w) {
  ms.validate();
  OracleResult res;
  std::vector<EvUser> users = ms.users;
  std::sort(users.begin(), users.end(),
            [](const EvUser& a, const EvUser& b) { return a.id < b.id; });

  std::vector<std::vector<Assignment>> options;
  res.joint_space = 1.0;
  for (const auto& u : users) {
    options.push_back(service_options(ms.net, u, ms.horizon, w));
    if (u.needs_charge() && options.back().size() == 1) {
      res.feasible = false;
      res.blocking_user = u.id;
      return res;
    }
    res.joint_space *= static_cast<double>(options.back().size());
  }
  if (res.joint_space > MicroScenario::kMaxJointSpace)
    throw ValidationError("joint action space " + std::to_string(res.joint_space) +
                          " exceeds the 1e6 guard");

  const std::size_t pools = ms.net.pool_count();
  std::vector<int> base(pools, 0);
  if (!ms.background.empty()) base = ms.background;
  // occ[tau * pools + p]
  std::vector<int> occ(static_cast<std::size_t>(ms.horizon) * pools, 0);
  for (int tau = 0; tau < ms.horizon; ++tau)
    for (PoolIndex p = 0; p < pools; ++p) occ[tau * pools + p] = base[p];

  std::vector<Assignment> pick(users.size());
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == users.size()) {
      ++res.schedules_checked;
      ScheduleEvaluation ev =
          evaluate_schedule(ms.net, users, ms.horizon, base, pick, w);
      if (ev.ok() && ev.total < best - 1e-12) {
        best = ev.total;
        res.schedule = pick;
        res.evaluation = std::move(ev);
      }
      return;
    }
    for (const auto& a : options[i]) {
      if (a.pool) {
        const PoolIndex p = *a.pool;
        const int cap = ms.net.pool(p).capacity;
        bool fits = true;
        for (int tau = a.start; tau < a.start + a.duration; ++tau)
          if (occ[tau * pools + p] + 1 > cap) fits = false;
        if (!fits) continue;
        for (int tau = a.start; tau < a.start + a.duration; ++tau) ++occ[tau * pools + p];
        pick[i] = a;
        rec(i + 1);
        for (int tau = a.start; tau < a.start + a.duration; ++tau) --occ[tau * pools + p];
      } else {
        pick[i] = a;
        rec(i + 1);
      }
    }
  };
  rec(0);
  res.total = best;
  return res;
}

MicroScenario random_micro_scenario(Rng& rng, int max_users, int max_lots, int max_periods,
                                    double pi) {
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };

  MicroScenario ms;
  ms.horizon = uniform_int(1, max_periods);
  const int lots = uniform_int(1, max_lots);
  Network& net = ms.net;
  net.nodes = {1, 2};
  net.origins = {1};
  net.destinations = {2};
  for (int j = 0; j < lots; ++j) {
    const int lot = 10 + j;
    net.nodes.push_back(lot);
    Facility f;
    f.lot = lot;
    for (int k = 0; k < kChargerTypes; ++k) {
      f.chargers[k].capacity = uniform_int(0, 2);
      f.chargers[k].search_time = uniform(0.5, 2.0);
      f.chargers[k].awareness = uniform(0.2, 1.0);
    }
    if (f.chargers[kSlow].capacity + f.chargers[kFast].capacity == 0)
      f.chargers[kSlow].capacity = 1;
    const double slow = uniform(0.5, 2.0);
    f.prices = {{slow, slow * uniform(1.2, 2.0)}};
    net.facilities.push_back(f);
    net.drive_cost_to_lot[{1, lot}] = uniform(1.0, 10.0);
    net.drive_cost_from_lot[{lot, 2}] = uniform(1.0, 10.0);
    net.onward_miles[{lot, 2}] = uniform(5.0, 40.0);
  }

  // Every threshold below stays reachable through the fast pool of the first lot.
  if (net.facilities[0].chargers[kFast].capacity == 0) net.facilities[0].chargers[kFast].capacity = 1;

  const int users = uniform_int(1, max_users);
  for (int i = 0; i < users; ++i) {
    EvUser u;
    u.id = i + 1;
    u.origin = 1;
    u.destination = 2;
    u.arrival_period = 0;
    u.battery_capacity = 50.0;
    u.soc = uniform(5.0, 25.0);
    u.parking_duration = uniform_int(1, 4);
    // Reachable with the fast rate within the stay and the horizon.
    const int reach = std::min(u.parking_duration, ms.horizon);
    const double gap = uniform(0.0, 2.0 * pi * reach);
    u.soc_threshold = std::min(u.battery_capacity, u.soc + gap);
    ms.users.push_back(u);
  }
  return ms;
}

}  // namespace evsched
