#include "evsched/benchmark.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "evsched/errors.hpp"

namespace evsched {

void FcfsQueue::push(PoolIndex p, int user) {
  if (!members_.insert(user).second)
    throw ContractViolation("user " + std::to_string(user) + " is already queued");
  lines_.at(p).push_back(user);
}

PriorityScheduler::PriorityScheduler(const Network& net, const CostWeights& w)
    : net_(net), w_(w), queue_(net.pool_count()) {}

std::vector<Action> PriorityScheduler::decide(const SystemState& state) {
  const int t = state.t;
  std::vector<int> free(net_.pool_count());
  for (PoolIndex p = 0; p < net_.pool_count(); ++p) free[p] = state.free_spots(p);
  std::vector<Action> actions;

  for (PoolIndex p = 0; p < net_.pool_count(); ++p) {
    while (!queue_.empty(p) && free[p] > 0) {
      const int id = queue_.head(p);
      queue_.pop(p);
      const EvUser* u = state.find_user(id);
      const DurationRange r =
          u ? duration_range(*u, pool_type(p), t, state.horizon, w_.pi) : DurationRange{1, 0};
      if (!u || r.empty()) {
        log_.push_back({t, p, id, QueueEventKind::dropped});
        continue;
      }
      actions.push_back(Action::charge(id, p, r.min));
      --free[p];
      log_.push_back({t, p, id, QueueEventKind::served});
    }
  }

  std::vector<const EvUser*> fresh;
  for (const EvUser* u : state.uncommitted_users())
    if (!seen_.count(u->id)) fresh.push_back(u);
  std::sort(fresh.begin(), fresh.end(), [](const EvUser* a, const EvUser* b) {
    return std::pair(a->arrival_period, a->id) < std::pair(b->arrival_period, b->id);
  });

  for (const EvUser* u : fresh) {
    seen_.insert(u->id);
    if (!u->needs_charge()) {
      actions.push_back(Action::skip(u->id));
      continue;
    }
    std::optional<PoolIndex> best;
    int best_n = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (PoolIndex p = 0; p < net_.pool_count(); ++p) {
      const ChargerPool& pool = net_.pool(p);
      if (pool.capacity <= 0) continue;
      const DurationRange r = duration_range(*u, pool_type(p), t, state.horizon, w_.pi);
      if (r.empty()) continue;
      const double wait = waiting_time(pool, state.occupancy[p], 0, w_.max_wait);
      const double c = user_cost(net_, *u, Action::charge(u->id, p, r.min), t, wait, w_);
      if (c < best_cost) {
        best_cost = c;
        best = p;
        best_n = r.min;
      }
    }
    if (!best) continue;
    const PoolIndex p = *best;
    if (free[p] > 0 && queue_.empty(p)) {
      actions.push_back(Action::charge(u->id, p, best_n));
      --free[p];
      log_.push_back({t, p, u->id, QueueEventKind::served});
    } else {
      queue_.push(p, u->id);
      log_.push_back({t, p, u->id, QueueEventKind::enqueued});
    }
  }
  std::sort(actions.begin(), actions.end(),
            [](const Action& a, const Action& b) { return a.user < b.user; });
  return actions;
}

std::vector<std::string> audit_queue_log(const std::vector<QueueEvent>& log) {
  std::vector<std::string> out;
  std::map<PoolIndex, std::deque<int>> waiting;
  for (const auto& e : log) {
    auto& line = waiting[e.pool];
    switch (e.kind) {
      case QueueEventKind::enqueued:
        line.push_back(e.user);
        break;
      case QueueEventKind::dropped:
      case QueueEventKind::served: {
        auto it = std::find(line.begin(), line.end(), e.user);
        if (it == line.end()) {
          if (e.kind == QueueEventKind::served && !line.empty())
            out.push_back("t=" + std::to_string(e.t) + ": user " + std::to_string(e.user) +
                          " served ahead of queued user " + std::to_string(line.front()));
        } else {
          if (it != line.begin())
            out.push_back("t=" + std::to_string(e.t) + ": user " + std::to_string(e.user) +
                          " left the line ahead of user " + std::to_string(line.front()));
          line.erase(it);
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace evsched
