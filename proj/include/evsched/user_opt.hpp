#pragma once

#include <limits>
#include <optional>
#include <span>

#include "evsched/action.hpp"
#include "evsched/demand.hpp"
#include "evsched/network.hpp"
#include "evsched/state.hpp"

namespace evsched {

struct CostWeights {
  double theta = 0.1;        // travel -> money
  double theta_wait = 1.0;   // waiting period -> money
  double alpha = 1.0;        // charging expense weight
  double alpha_over = 0.1;   // overcharge penalty factor
  double pi = 6.2;           // nominal slow rate, kWh per period
  double big_m = 1000.0;     // M
  double max_wait = kDefaultMaxWait;
  double exp_cap = 50.0;     // clamp on the penalty exponent
  double unserved_penalty = 20.0;  // charged once for a user never served

  void validate(int horizon) const;
};

inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

/// phi split into its parts for a charging action.
struct CostTerms {
  double travel = 0.0;    // theta (v + mu)
  double waiting = 0.0;   // theta' L
  double charging = 0.0;  // alpha p n
  double penalty = 0.0;   // alpha' max(0, psi - n)

  double total() const { return travel + waiting + charging + penalty; }
};

/// Requires a.charges().
CostTerms cost_terms(const Network& net, const EvUser& user, const Action& a, int t,
                     double wait, const CostWeights& w);

/// phi_i^t. "No charge" costs 0 when the SOC threshold is already met and
/// kInfeasibleCost otherwise.
double user_cost(const Network& net, const EvUser& user, const Action& a, int t, double wait,
                 const CostWeights& w);

/// phi_i^t with the waiting time taken from state.waiting.
double user_cost(const Network& net, const EvUser& user, const Action& a,
                 const SystemState& state, const CostWeights& w);

/// L-hat for pool p with `others` users declared there besides this one.
double perceived_wait(const Network& net, const SystemState& state, PoolIndex p, int others,
                      const CostWeights& w);

/// g = y + others - (c - sigma); <= 0 means the capacity constraint holds.
inline double constraint_violation(int y, int others, int free_spots) {
  return static_cast<double>(y + others - free_spots);
}

/// g at the chosen pool of `a` given the other users' per-pool counts.
/// A "no charge" action has y = 0 everywhere and returns 0.
double constraint_violation(const Action& a, std::span<const int> others,
                            const SystemState& state);

/// Penalty multipliers u^{i,z}_jk of one user (indexed by pool) and rho_z.
struct MultiplierView {
  std::span<const double> u;
  double rho = 1.0;
};

/// rho^-1 u exp(min(rho g, exp_cap)).
double penalty_term(double u, double rho, double g, double exp_cap);

/// Penalized objective: phi_i^t plus the exponential penalty on the chosen pool.
/// Waiting time is perceived from sigma plus `others`.
double penalized_cost(const Network& net, const EvUser& user, const Action& a,
                      const SystemState& state, std::span<const int> others,
                      const CostWeights& w, const MultiplierView& mult);

struct DurationRange {
  int min = 1;
  int max = 0;
  bool empty() const { return min > max; }
};

/// n_min = ceil((Q - b) / (pi (k + 1))) (at least 1), n_max = min(psi, T - t).
DurationRange duration_range(const EvUser& user, int k, int t, int horizon, double pi);

/// Exact minimizer of penalized_cost over {no charge (if allowed)} and every
/// (pool, n) with capacity > 0 and n in duration_range. Ties go to lower
/// cost, then lower lot id, then lower type, then lower n; "no charge" wins
/// ties. Returns nullopt ("unserved") when the action set is empty.
std::optional<Action> best_response(const Network& net, const EvUser& user,
                                    const SystemState& state, std::span<const int> others,
                                    const CostWeights& w, const MultiplierView& mult);

}  // namespace evsched
