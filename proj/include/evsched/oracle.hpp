#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evsched/demand.hpp"
#include "evsched/network.hpp"
#include "evsched/rng.hpp"
#include "evsched/schedule.hpp"
#include "evsched/user_opt.hpp"

namespace evsched {

/// Tiny instance solved exactly with nominal (noise-free) charging rates.
struct MicroScenario {
  Network net;
  std::vector<EvUser> users;
  int horizon = 1;
  std::vector<int> background;  // per pool; empty means all free

  static constexpr std::size_t kMaxUsers = 4;
  static constexpr std::size_t kMaxFacilities = 3;
  static constexpr int kMaxHorizon = 4;
  static constexpr double kMaxJointSpace = 1e6;

  /// Throws ValidationError when a size limit is exceeded.
  void validate() const;
};

struct OracleResult {
  bool feasible = true;
  std::optional<int> blocking_user;  // set when infeasible
  std::vector<Assignment> schedule;  // one entry per user, ordered by id
  ScheduleEvaluation evaluation;
  double total = 0.0;
  double joint_space = 0.0;  // product of per-user option counts
  long schedules_checked = 0;
};

/// Per-user service options in enumeration order: (start, pool, n)
/// ascending, then "never served". A user that does not need charge has the
/// single option of not charging.
std::vector<Assignment> service_options(const Network& net, const EvUser& u, int horizon,
                                        const CostWeights& w);

/// Exhaustive search over every joint schedule that respects capacity in
/// every period. The optimum is the lowest evaluate_schedule total; ties
/// keep the lexicographically first schedule in enumeration order. A user
/// that needs charge but has no way to reach its threshold makes the
/// instance infeasible. Throws ValidationError when the joint space is over
/// the guard.
OracleResult brute_force(const MicroScenario& ms, const CostWeights& w);

/// Random feasible instance with up to `max_users` users arriving at t = 0,
/// `max_lots` lots and `max_periods` periods.
MicroScenario random_micro_scenario(Rng& rng, int max_users = 3, int max_lots = 2,
                                    int max_periods = 3, double pi = 6.2);

}  // namespace evsched
