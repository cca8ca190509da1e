#include "evsched/user_opt.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <tuple>

#include "evsched/errors.hpp"

namespace evsched {

void CostWeights::validate(int horizon) const {
  for (double v : {theta, theta_wait, alpha, alpha_over, pi, big_m, max_wait, exp_cap,
                   unserved_penalty})
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("weights must be finite and >= 0");
  if (!(pi > 0.0)) throw ValidationError("weights.pi must be > 0");
  if (big_m < static_cast<double>(horizon)) throw ValidationError("weights.big_m must be >= T");
}

CostTerms cost_terms(const Network& net, const EvUser& user, const Action& a, int t,
                     double wait, const CostWeights& w) {
  if (!a.pool) throw ContractViolation("cost_terms needs a charging action");
  const PoolIndex p = *a.pool;
  CostTerms c;
  c.travel = w.theta * trip_cost(net, user.origin, net.pool_lot(p), user.destination);
  c.waiting = w.theta_wait * wait;
  c.charging = w.alpha * net.pool_price(p, t) * static_cast<double>(a.duration);
  c.penalty = w.alpha_over * static_cast<double>(std::max(0, user.parking_duration - a.duration));
  return c;
}

double user_cost(const Network& net, const EvUser& user, const Action& a, int t, double wait,
                 const CostWeights& w) {
  if (!a.pool) return user.needs_charge() ? kInfeasibleCost : 0.0;
  return cost_terms(net, user, a, t, wait, w).total();
}

double user_cost(const Network& net, const EvUser& user, const Action& a,
                 const SystemState& state, const CostWeights& w) {
  const double wait = a.pool ? state.waiting[*a.pool] : 0.0;
  return user_cost(net, user, a, state.t, wait, w);
}

double perceived_wait(const Network& net, const SystemState& state, PoolIndex p, int others,
                      const CostWeights& w) {
  return waiting_time(net.pool(p), state.occupancy[p], others, w.max_wait);
}

double constraint_violation(const Action& a, std::span<const int> others,
                            const SystemState& state) {
  if (!a.pool) return 0.0;
  const PoolIndex p = *a.pool;
  return constraint_violation(1, others[p], state.free_spots(p));
}

double penalty_term(double u, double rho, double g, double exp_cap) {
  if (u == 0.0) return 0.0;
  return u / rho * std::exp(std::min(rho * g, exp_cap));
}

double penalized_cost(const Network& net, const EvUser& user, const Action& a,
                      const SystemState& state, std::span<const int> others,
                      const CostWeights& w, const MultiplierView& mult) {
  if (!a.pool) return user_cost(net, user, a, state.t, 0.0, w);
  const PoolIndex p = *a.pool;
  const double wait = perceived_wait(net, state, p, others[p], w);
  const double base = user_cost(net, user, a, state.t, wait, w);
  const double u = mult.u.empty() ? 0.0 : mult.u[p];
  return base + penalty_term(u, mult.rho, constraint_violation(a, others, state), w.exp_cap);
}

DurationRange duration_range(const EvUser& user, int k, int t, int horizon, double pi) {
  DurationRange r;
  const double gap = user.soc_threshold - user.soc;
  if (gap > 0.0) {
    const double rate = pi * static_cast<double>(k + 1);
    r.min = std::max(1, static_cast<int>(std::ceil(gap / rate - 1e-9)));
  }
  r.max = std::min(user.parking_duration, horizon - t);
  return r;
}

std::optional<Action> best_response(const Network& net, const EvUser& user,
                                    const SystemState& state, std::span<const int> others,
                                    const CostWeights& w, const MultiplierView& mult) {
  using Key = std::tuple<double, int, int, int>;
  std::optional<Action> best;
  Key best_key{kInfeasibleCost, INT_MAX, INT_MAX, INT_MAX};
  if (!user.needs_charge()) {
    best = Action::skip(user.id);
    best_key = Key{0.0, INT_MIN, INT_MIN, INT_MIN};
  }
  for (PoolIndex p = 0; p < net.pool_count(); ++p) {
    const ChargerPool& pool = net.pool(p);
    if (pool.capacity <= 0) continue;
    const int k = pool_type(p);
    const DurationRange range = duration_range(user, k, state.t, state.horizon, w.pi);
    if (range.empty()) continue;
    // Everything except the charge/penalty terms is independent of n.
    const double wait = perceived_wait(net, state, p, others[p], w);
    const double fixed =
        w.theta * trip_cost(net, user.origin, net.pool_lot(p), user.destination) +
        w.theta_wait * wait;
    const double u = mult.u.empty() ? 0.0 : mult.u[p];
    const double pen =
        penalty_term(u, mult.rho, constraint_violation(1, others[p], state.free_spots(p)), w.exp_cap);
    const double price = net.pool_price(p, state.t);
    for (int n = range.min; n <= range.max; ++n) {
      const double cost = fixed + w.alpha * price * n +
                          w.alpha_over * std::max(0, user.parking_duration - n) + pen;
      const Key key{cost, net.pool_lot(p), k, n};
      if (key < best_key) {
        best_key = key;
        best = Action::charge(user.id, p, n);
      }
    }
  }
  return best;
}

}  // namespace evsched
