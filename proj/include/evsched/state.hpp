#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "evsched/action.hpp"
#include "evsched/demand.hpp"
#include "evsched/network.hpp"

namespace evsched {

/// A user's occupancy of one charger until its committed duration ends.
struct Commitment {
  PoolIndex pool = 0;
  int remaining = 0;  // periods of n_ijk still to run, including the current one
  int start = 0;
  int duration = 0;

  bool operator==(const Commitment&) const = default;
};

/// The DP state S^t. Per-pool vectors are indexed by PoolIndex.
///
/// Spot accounting: occupancy[p] + available[p] + new_spots[p] == capacity
/// for every pool, where occupancy counts committed users plus
/// `background` vehicles that are outside the schedule.
struct SystemState {
  int t = 0;
  int horizon = 1;  // T
  std::vector<int> available;   // J^t_jk
  std::vector<int> new_spots;   // J-hat^t_jk
  std::vector<int> occupancy;   // sigma^t_jk
  std::vector<int> background;  // occupied spots not held by scheduled users
  std::vector<double> waiting;  // L^t_jk, periods
  std::vector<EvUser> users;    // D^{t+}, ordered by id
  std::vector<int> new_user_ids;  // D-hat^t
  std::map<int, Commitment> commitments;
  std::vector<EvUser> departed;  // users that left during the last transition

  int free_spots(PoolIndex p) const { return available[p] + new_spots[p]; }
  const EvUser* find_user(int id) const;
  bool committed(int id) const { return commitments.count(id) != 0; }
  /// Users present and not holding a charger.
  std::vector<const EvUser*> uncommitted_users() const;
};

/// Exogenous information W^{t+1} revealed between t and t+1.
struct ExogenousInfo {
  std::vector<EvUser> arrivals;   // D-hat^{t+1}
  std::vector<int> released_spots;  // background vehicles leaving, per pool
  std::map<std::pair<int, int>, double> delivered;  // (user, t) -> kWh this period
  std::optional<std::vector<double>> perceived_waits;  // L-hat override
};

/// Saturation value of the waiting time when a pool is full.
inline constexpr double kDefaultMaxWait = 1000.0;

/// Waiting time: e * beta / (1 - (sigma + pending) / c), or `max_wait`
/// once sigma + pending reaches c. Throws ValidationError when c == 0.
double waiting_time(const ChargerPool& pool, int occupied, int pending,
                    double max_wait = kDefaultMaxWait);

/// Builds S^t with every spot free except `background`, adding `arrivals`.
SystemState initial_state(const Network& net, int t, int horizon,
                          std::vector<EvUser> arrivals, std::vector<int> background = {},
                          double max_wait = kDefaultMaxWait);

/// (user id, pool) for every user that charges during period t under
/// `actions`: existing commitments plus new charge actions.
std::vector<std::pair<int, PoolIndex>> charging_users(const SystemState& state,
                                                      std::span<const Action> actions);

/// Exogenous info with nominal delivery pi * (k + 1) for all charging users.
ExogenousInfo nominal_exogenous(const SystemState& state, std::span<const Action> actions,
                                double pi, std::vector<EvUser> arrivals = {});

/// S^{t+1} from S^t, the joint action and the exogenous information.
/// Users with a "no charge" action leave; users without any action stay
/// unserved with psi intact; charging users gain the delivered energy
/// (capped at capacity) and leave when their commitment or parking
/// duration runs out, freeing the spot into J-hat^{t+1}.
/// Throws ContractViolation when the actions overrun capacity, reference
/// unknown or already-committed users, or when delivery samples are missing.
SystemState advance(const Network& net, const SystemState& state,
                    std::span<const Action> actions, const ExogenousInfo& exo,
                    double max_wait = kDefaultMaxWait);

/// Throws ContractViolation if the spot accounting invariants are broken.
void check_spot_conservation(const Network& net, const SystemState& state);

}  // namespace evsched
