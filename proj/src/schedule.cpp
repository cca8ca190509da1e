#include "evsched/schedule.hpp"

#include <algorithm>
#include <map>

#include "evsched/state.hpp"

namespace evsched {

ScheduleEvaluation evaluate_schedule(const Network& net, std::span<const EvUser> users,
                                     int horizon, std::span<const int> background,
                                     std::span<const Assignment> assignments,
                                     const CostWeights& w) {
  ScheduleEvaluation ev;
  const std::size_t pools = net.pool_count();
  auto bg = [&](PoolIndex p) { return background.empty() ? 0 : background[p]; };

  std::map<int, const Assignment*> by_user;
  for (const auto& a : assignments) {
    if (!by_user.emplace(a.user, &a).second)
      ev.violations.push_back("user " + std::to_string(a.user) + " assigned twice");
  }

  // occupancy[t][p] from all served users; starts[t][p] counts new starts.
  std::vector<std::vector<int>> occupancy(static_cast<std::size_t>(horizon),
                                          std::vector<int>(pools, 0));
  std::vector<std::vector<int>> starts = occupancy;
  for (const auto& a : assignments) {
    if (!a.pool) continue;
    if (a.start < 0 || a.start >= horizon || a.duration < 1 || *a.pool >= pools) {
      ev.violations.push_back("user " + std::to_string(a.user) + ": malformed assignment");
      continue;
    }
    starts[static_cast<std::size_t>(a.start)][*a.pool] += 1;
    for (int t = a.start; t < std::min(horizon, a.start + a.duration); ++t)
      occupancy[static_cast<std::size_t>(t)][*a.pool] += 1;
  }
  for (int t = 0; t < horizon; ++t)
    for (PoolIndex p = 0; p < pools; ++p)
      if (occupancy[static_cast<std::size_t>(t)][p] + bg(p) > net.pool(p).capacity)
        ev.violations.push_back("capacity exceeded at t=" + std::to_string(t) + " lot " +
                                std::to_string(net.pool_lot(p)) + " type " +
                                std::to_string(pool_type(p)));

  std::vector<EvUser> sorted(users.begin(), users.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& u : sorted) {
    UserCostRow row;
    row.user = u.id;
    auto it = by_user.find(u.id);
    const Assignment* a = it == by_user.end() ? nullptr : it->second;
    if (a && a->pool && a->start >= 0 && a->start < horizon && *a->pool < pools) {
      const PoolIndex p = *a->pool;
      const int s = a->start;
      row.outcome = ServiceOutcome::served;
      row.start = s;
      row.pool = p;
      row.duration = a->duration;
      row.wait_periods = s - u.arrival_period;
      const auto si = static_cast<std::size_t>(s);
      const int sigma = bg(p) + occupancy[si][p] - starts[si][p];
      const int others = starts[si][p] - 1;
      row.wait_time = net.pool(p).capacity > 0
                          ? waiting_time(net.pool(p), sigma, others, w.max_wait)
                          : w.max_wait;
      row.terms = cost_terms(net, u, Action::charge(u.id, p, a->duration), s, row.wait_time, w);
      row.queueing = w.theta_wait * row.wait_periods;
      const std::string who = "user " + std::to_string(u.id);
      if (row.wait_periods < 0) ev.violations.push_back(who + " served before arrival");
      if (a->duration > std::min(u.parking_duration, horizon - s))
        ev.violations.push_back(who + " committed beyond parking duration or horizon");
      if (u.soc + w.pi * (pool_type(p) + 1) * a->duration < u.soc_threshold - 1e-9)
        ev.violations.push_back(who + " commitment cannot reach the SOC threshold");
    } else if (!u.needs_charge()) {
      row.outcome = ServiceOutcome::skipped;
    } else {
      row.outcome = ServiceOutcome::unserved;
      row.wait_periods = horizon - u.arrival_period;
      row.queueing = w.theta_wait * row.wait_periods;
      row.unserved = w.unserved_penalty;
    }
    row.total = row.terms.total() + row.queueing + row.unserved;
    ev.total += row.total;
    ev.travel += row.terms.travel + row.terms.waiting + row.queueing + row.unserved;
    ev.charging += row.terms.charging;
    ev.penalty += row.terms.penalty;
    ev.rows.push_back(row);
  }
  return ev;
}

}  // namespace evsched
