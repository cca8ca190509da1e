#include "evsched/state.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "evsched/errors.hpp"

namespace evsched {

const EvUser* SystemState::find_user(int id) const {
  auto it = std::lower_bound(users.begin(), users.end(), id,
                             [](const EvUser& u, int v) { return u.id < v; });
  return (it != users.end() && it->id == id) ? &*it : nullptr;
}

std::vector<const EvUser*> SystemState::uncommitted_users() const {
  std::vector<const EvUser*> out;
  for (const auto& u : users)
    if (!committed(u.id)) out.push_back(&u);
  return out;
}

double waiting_time(const ChargerPool& pool, int occupied, int pending, double max_wait) {
  if (pool.capacity <= 0) throw ValidationError("no such charger pool (capacity 0)");
  const int load = occupied + pending;
  if (load >= pool.capacity) return max_wait;
  const double ratio = static_cast<double>(load) / static_cast<double>(pool.capacity);
  return pool.search_time * pool.awareness / (1.0 - ratio);
}

namespace {

void refresh_waits(const Network& net, SystemState& s, double max_wait) {
  s.waiting.assign(net.pool_count(), max_wait);
  for (PoolIndex p = 0; p < net.pool_count(); ++p)
    if (net.pool(p).capacity > 0) s.waiting[p] = waiting_time(net.pool(p), s.occupancy[p], 0, max_wait);
}

void sort_users(std::vector<EvUser>& users) {
  std::sort(users.begin(), users.end(),
            [](const EvUser& a, const EvUser& b) { return a.id < b.id; });
}

}  // namespace

SystemState initial_state(const Network& net, int t, int horizon, std::vector<EvUser> arrivals,
                          std::vector<int> background, double max_wait) {
  const std::size_t pools = net.pool_count();
  SystemState s;
  s.t = t;
  s.horizon = horizon;
  if (background.empty()) background.assign(pools, 0);
  if (background.size() != pools) throw ValidationError("background occupancy size mismatch");
  s.background = std::move(background);
  s.available.assign(pools, 0);
  s.new_spots.assign(pools, 0);
  s.occupancy.assign(pools, 0);
  for (PoolIndex p = 0; p < pools; ++p) {
    const int c = net.pool(p).capacity;
    if (s.background[p] < 0 || s.background[p] > c)
      throw ValidationError("background occupancy outside [0, capacity]");
    s.occupancy[p] = s.background[p];
    s.available[p] = c - s.background[p];
  }
  sort_users(arrivals);
  for (const auto& u : arrivals) s.new_user_ids.push_back(u.id);
  s.users = std::move(arrivals);
  refresh_waits(net, s, max_wait);
  return s;
}

std::vector<std::pair<int, PoolIndex>> charging_users(const SystemState& state,
                                                      std::span<const Action> actions) {
  std::vector<std::pair<int, PoolIndex>> out;
  for (const auto& [id, c] : state.commitments) out.emplace_back(id, c.pool);
  for (const auto& a : actions)
    if (a.pool) out.emplace_back(a.user, *a.pool);
  std::sort(out.begin(), out.end());
  return out;
}

ExogenousInfo nominal_exogenous(const SystemState& state, std::span<const Action> actions,
                                double pi, std::vector<EvUser> arrivals) {
  ExogenousInfo exo;
  exo.arrivals = std::move(arrivals);
  for (const auto& [id, p] : charging_users(state, actions))
    exo.delivered[{id, state.t}] = pi * static_cast<double>(pool_type(p) + 1);
  return exo;
}

SystemState advance(const Network& net, const SystemState& state,
                    std::span<const Action> actions, const ExogenousInfo& exo,
                    double max_wait) {
  const std::size_t pools = net.pool_count();
  std::vector<int> assigned(pools, 0);
  std::set<int> seen;
  std::set<int> leaving;
  for (const auto& a : actions) {
    const std::string who = "user " + std::to_string(a.user);
    if (!seen.insert(a.user).second) throw ContractViolation(who + " has two actions");
    if (!state.find_user(a.user)) throw ContractViolation(who + " is not in the state");
    if (state.committed(a.user)) throw ContractViolation(who + " is already charging");
    if (!a.well_formed()) throw ContractViolation(who + ": malformed action");
    if (!a.pool) {
      leaving.insert(a.user);
      continue;
    }
    if (*a.pool >= pools || net.pool(*a.pool).capacity <= 0)
      throw ContractViolation(who + ": unknown charger pool");
    if (++assigned[*a.pool] > state.free_spots(*a.pool))
      throw ContractViolation("capacity exceeded at lot " + std::to_string(net.pool_lot(*a.pool)) +
                              " type " + std::to_string(pool_type(*a.pool)));
  }

  SystemState next;
  next.t = state.t + 1;
  next.horizon = state.horizon;
  next.background = state.background;
  next.commitments = state.commitments;
  for (const auto& a : actions)
    if (a.pool) next.commitments[a.user] = Commitment{*a.pool, a.duration, state.t, a.duration};

  std::vector<int> freed(pools, 0);
  next.users.reserve(state.users.size() + exo.arrivals.size());
  for (const auto& u : state.users) {
    if (leaving.count(u.id)) {
      next.departed.push_back(u);
      continue;
    }
    auto it = next.commitments.find(u.id);
    if (it == next.commitments.end()) {
      next.users.push_back(u);
      continue;
    }
    auto d = exo.delivered.find({u.id, state.t});
    if (d == exo.delivered.end())
      throw ContractViolation("no delivered-energy sample for user " + std::to_string(u.id));
    EvUser moved = u;
    moved.soc = std::min(moved.battery_capacity, moved.soc + std::max(0.0, d->second));
    moved.parking_duration -= 1;
    it->second.remaining -= 1;
    if (it->second.remaining <= 0 || moved.parking_duration <= 0) {
      freed[it->second.pool] += 1;
      next.commitments.erase(it);
      next.departed.push_back(moved);
    } else {
      next.users.push_back(moved);
    }
  }

  if (!exo.released_spots.empty()) {
    if (exo.released_spots.size() != pools)
      throw ContractViolation("released_spots size mismatch");
    for (PoolIndex p = 0; p < pools; ++p) {
      const int rel = std::clamp(exo.released_spots[p], 0, next.background[p]);
      next.background[p] -= rel;
      freed[p] += rel;
    }
  }

  next.available.assign(pools, 0);
  next.occupancy.assign(pools, 0);
  next.new_spots = freed;
  for (PoolIndex p = 0; p < pools; ++p) {
    next.available[p] = state.free_spots(p) - assigned[p];
    next.occupancy[p] = next.background[p];
  }
  for (const auto& [id, c] : next.commitments) next.occupancy[c.pool] += 1;

  for (const auto& u : exo.arrivals) {
    next.new_user_ids.push_back(u.id);
    next.users.push_back(u);
  }
  sort_users(next.users);
  std::sort(next.new_user_ids.begin(), next.new_user_ids.end());

  if (exo.perceived_waits) {
    if (exo.perceived_waits->size() != pools)
      throw ContractViolation("perceived_waits size mismatch");
    next.waiting = *exo.perceived_waits;
  } else {
    refresh_waits(net, next, max_wait);
  }
  return next;
}

void check_spot_conservation(const Network& net, const SystemState& state) {
  std::vector<int> held(net.pool_count(), 0);
  for (const auto& [id, c] : state.commitments) {
    if (!state.find_user(id))
      throw ContractViolation("committed user " + std::to_string(id) + " is not present");
    held[c.pool] += 1;
  }
  for (PoolIndex p = 0; p < net.pool_count(); ++p) {
    const int c = net.pool(p).capacity;
    if (state.occupancy[p] != held[p] + state.background[p])
      throw ContractViolation("occupancy does not match commitments");
    if (state.occupancy[p] < 0 || state.occupancy[p] > c)
      throw ContractViolation("occupancy outside [0, capacity]");
    if (state.occupancy[p] + state.available[p] + state.new_spots[p] != c)
      throw ContractViolation("spot conservation broken");
  }
}

}  // namespace evsched
