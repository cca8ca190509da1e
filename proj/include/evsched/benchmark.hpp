#pragma once

#include <deque>
#include <set>
#include <string>
#include <vector>

#include "evsched/action.hpp"
#include "evsched/network.hpp"
#include "evsched/state.hpp"
#include "evsched/user_opt.hpp"

namespace evsched {

/// Waiting lines per charger pool, ordered by arrival period then user id.
class FcfsQueue {
 public:
  explicit FcfsQueue(std::size_t pools = 0) : lines_(pools) {}

  void push(PoolIndex p, int user);
  int head(PoolIndex p) const { return lines_.at(p).front(); }
  void pop(PoolIndex p) {
    members_.erase(lines_.at(p).front());
    lines_.at(p).pop_front();
  }
  bool empty(PoolIndex p) const { return lines_.at(p).empty(); }
  std::size_t size(PoolIndex p) const { return lines_.at(p).size(); }
  bool contains(int user) const { return members_.count(user) != 0; }
  const std::deque<int>& line(PoolIndex p) const { return lines_.at(p); }

 private:
  std::vector<std::deque<int>> lines_;
  std::set<int> members_;
};

enum class QueueEventKind { enqueued, served, dropped };

struct QueueEvent {
  int t = 0;
  PoolIndex pool = 0;
  int user = 0;
  QueueEventKind kind = QueueEventKind::served;
};

/// First-come-first-serve baseline. Each arriving user picks the pool with
/// the lowest myopic cost (wait with no other pending users) and the
/// smallest duration reaching its threshold at the nominal rate; when that
/// pool is full or has a line the user joins the line. Spots freed in a
/// period go to the heads of the lines first. A head that can no longer
/// reach its threshold before leaving is dropped and stays unserved.
class PriorityScheduler {
 public:
  PriorityScheduler(const Network& net, const CostWeights& w);

  /// Joint action for S^t. Queued users get no action and stay in the state.
  std::vector<Action> decide(const SystemState& state);

  const FcfsQueue& queue() const { return queue_; }
  const std::vector<QueueEvent>& log() const { return log_; }

 private:
  const Network& net_;
  CostWeights w_;
  FcfsQueue queue_;
  std::set<int> seen_;
  std::vector<QueueEvent> log_;
};

/// Queue discipline violations in an audit log: a user served at a pool
/// before someone who joined that pool's line earlier and was still waiting.
std::vector<std::string> audit_queue_log(const std::vector<QueueEvent>& log);

}  // namespace evsched
