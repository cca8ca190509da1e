#pragma once

#include <optional>
#include <span>
#include <vector>

#include "evsched/action.hpp"
#include "evsched/demand.hpp"
#include "evsched/network.hpp"
#include "evsched/state.hpp"
#include "evsched/user_opt.hpp"

namespace evsched {

struct GneConfig {
  int max_iters = 10;     // Z
  double rel_tol = 0.005;  // stop when |d sum phi| / sum phi falls below this
  double rho0 = 1.0;
  double growth = 2.0;    // rho_{z+1} = growth * rho_z
  double u0 = 1.0;
  unsigned workers = 1;

  void validate() const;
};

/// Penalty weight rho_z and multipliers u^{i,z}_jk, stored users x pools.
struct MultiplierState {
  int z = 0;
  double rho = 1.0;
  std::size_t pools = 0;
  std::vector<double> u;

  static MultiplierState initial(std::size_t users, std::size_t pools, double rho0, double u0);
  std::span<const double> row(std::size_t user_index) const {
    return std::span<const double>(u).subspan(user_index * pools, pools);
  }
  MultiplierView view(std::size_t user_index) const { return {row(user_index), rho}; }
};

/// u' = max(0, u + rho g) elementwise, then rho' = growth * rho and z' = z + 1.
/// `violations` is laid out like MultiplierState::u.
MultiplierState update_multipliers(const MultiplierState& m, std::span<const double> violations,
                                   double growth);

/// One user's choice within a GNE iteration; nullopt means unserved.
using Profile = std::vector<std::optional<Action>>;

/// Users per pool choosing to charge under `profile`.
std::vector<int> pool_counts(const Profile& profile, std::size_t pools);

struct TraceRow {
  int iter = 0;
  double total = 0.0;     // sum of phi_i over users declaring a charge
  double travel = 0.0;    // driving + waiting
  double charging = 0.0;
  double penalty = 0.0;
  double max_violation = 0.0;  // max over pools of declared - free
  std::vector<int> occupancy;  // sigma + admitted users, per pool
  std::optional<std::vector<int>> marginal;  // change vs previous iteration
};

struct RoundResult {
  Profile profile;              // declared best responses
  std::vector<double> costs;    // penalized cost of each declared action
  TraceRow row;
  std::vector<double> violations;  // g^i_jk, users x pools
};

/// One Jacobi sweep: every user best-responds to `previous` simultaneously.
/// The trace row prices the declared profile with phi, each user seeing
/// the other declarations in its waiting time.
RoundResult consensus_round(const Network& net, const SystemState& state,
                            std::span<const EvUser> users, const MultiplierState& m,
                            const CostWeights& w, const Profile& previous,
                            unsigned workers = 1);

/// Coordination step after a sweep. Users whose declaration differs from
/// `admitted` are considered in order of their gain (unserved users first,
/// then the largest drop in penalized cost, then user id); a move is
/// accepted when it fits the remaining capacity and still lowers the
/// user's penalized cost against the profile as updated so far. The result
/// always satisfies capacity. Returns the ids of users whose move was
/// refused.
std::vector<int> accept_moves(const Network& net, const SystemState& state,
                              std::span<const EvUser> users, const MultiplierState& m,
                              const CostWeights& w, Profile& admitted,
                              const Profile& declared);

struct GneResult {
  std::vector<Action> actions;  // feasible joint action (charges and skips)
  Profile profile;              // final admitted profile, one entry per user
  std::vector<TraceRow> trace;
  MultiplierState multipliers;  // after the last update
  MultiplierState last_used;    // multipliers used by the last sweep
  std::vector<int> evicted;     // users whose last declared move was refused
  int iterations = 0;
};

/// Consensus loop: sweeps and multiplier updates until the relative change
/// of the declared objective drops below rel_tol or max_iters is reached.
/// Each sweep's declarations pass through accept_moves before the next
/// sweep sees them, so the returned joint action always satisfies capacity.
GneResult run_gne(const Network& net, const SystemState& state, std::span<const EvUser> users,
                  const CostWeights& w, const GneConfig& cfg);

struct KktUserReport {
  int user = 0;
  double stationarity_objective = 0.0;  // residual of the y-stationarity row
  double stationarity_duration = 0.0;   // residual of the n-stationarity row
  double max_complementarity = 0.0;
};

struct KktReport {
  std::vector<KktUserReport> users;
  double max_complementarity = 0.0;
  double max_stationarity = 0.0;
};

/// KKT diagnostic for a converged profile. eta^i_jk = u^{i,z}_jk exp(rho_z g)
/// comes from the multipliers; the remaining multipliers are fitted by
/// non-negative least squares over the active constraints only.
KktReport check_kkt_residuals(const Network& net, const SystemState& state,
                              std::span<const EvUser> users, const Profile& profile,
                              const MultiplierState& m, const CostWeights& w);

}  // namespace evsched
