#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evsched/demand.hpp"
#include "evsched/network.hpp"
#include "evsched/user_opt.hpp"

namespace evsched {

/// Where and when a user was served. A missing pool means the user never
/// charged (either it did not need to, or it was never served).
struct Assignment {
  int user = 0;
  int start = 0;
  std::optional<PoolIndex> pool;
  int duration = 0;
};

enum class ServiceOutcome { served, skipped, unserved };

struct UserCostRow {
  int user = 0;
  ServiceOutcome outcome = ServiceOutcome::unserved;
  int start = -1;
  std::optional<PoolIndex> pool;
  int duration = 0;
  int wait_periods = 0;  // periods between arrival and service (or horizon end)
  double wait_time = 0.0;  // L at the start period, periods
  CostTerms terms;
  double queueing = 0.0;  // theta' * wait_periods
  double unserved = 0.0;  // penalty for never being served
  double total = 0.0;
};

/// Realized cost of a complete schedule, shared by every scheduler and the
/// brute-force oracle so their totals are directly comparable.
///
/// A served user pays its travel-plus-charging cost with L taken from the
/// waiting formula at its start period
/// (sigma = background plus users still charging from earlier periods,
/// pending = other users starting at the same pool in the same period),
/// plus theta' per period waited since arrival. A user that needed charge
/// and was never served pays theta' per period until the horizon plus
/// `unserved_penalty`. A user that did not need charge pays 0.
struct ScheduleEvaluation {
  std::vector<UserCostRow> rows;  // ordered by user id
  double total = 0.0;
  double travel = 0.0;    // driving + waiting + queueing + unserved
  double charging = 0.0;
  double penalty = 0.0;
  std::vector<std::string> violations;  // capacity / threshold / timing audit failures

  bool ok() const { return violations.empty(); }
};

ScheduleEvaluation evaluate_schedule(const Network& net, std::span<const EvUser> users,
                                     int horizon, std::span<const int> background,
                                     std::span<const Assignment> assignments,
                                     const CostWeights& w);

}  // namespace evsched
