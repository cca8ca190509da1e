#include "evsched/gne.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <tuple>

#include "evsched/errors.hpp"

namespace evsched {

void GneConfig::validate() const {
  if (max_iters < 1) throw ValidationError("gne.max_iters must be >= 1");
  if (!(rel_tol >= 0.0)) throw ValidationError("gne.rel_tol must be >= 0");
  if (!(rho0 > 0.0)) throw ValidationError("gne.rho0 must be > 0");
  if (!(growth > 1.0)) throw ValidationError("gne.growth must be > 1 (rho strictly increases)");
  if (!(u0 >= 0.0)) throw ValidationError("gne.u0 must be >= 0");
}

MultiplierState MultiplierState::initial(std::size_t users, std::size_t pools, double rho0,
                                         double u0) {
  MultiplierState m;
  m.rho = rho0;
  m.pools = pools;
  m.u.assign(users * pools, u0);
  return m;
}

MultiplierState update_multipliers(const MultiplierState& m, std::span<const double> violations,
                                   double growth) {
  if (!(m.rho > 0.0)) throw ContractViolation("rho must be positive");
  if (violations.size() != m.u.size()) throw ContractViolation("violation layout mismatch");
  MultiplierState next = m;
  for (std::size_t i = 0; i < m.u.size(); ++i)
    next.u[i] = std::max(0.0, m.u[i] + m.rho * violations[i]);
  next.rho = m.rho * growth;
  next.z = m.z + 1;
  return next;
}

std::vector<int> pool_counts(const Profile& profile, std::size_t pools) {
  std::vector<int> counts(pools, 0);
  for (const auto& a : profile)
    if (a && a->pool) counts[*a->pool] += 1;
  return counts;
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<int> occupancy_of(const SystemState& state, const Profile& profile) {
  auto occ = state.occupancy;
  const auto counts = pool_counts(profile, occ.size());
  for (std::size_t p = 0; p < occ.size(); ++p) occ[p] += counts[p];
  return occ;
}

/// phi totals of a profile, each user seeing the others at its pool.
void price_profile(const Network& net, const SystemState& state, std::span<const EvUser> users,
                   const Profile& profile, const CostWeights& w, TraceRow& row) {
  const std::vector<int> counts = pool_counts(profile, net.pool_count());
  row.travel = row.charging = row.penalty = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& a = profile[i];
    if (!a || !a->pool) continue;
    const PoolIndex p = *a->pool;
    const double wait = perceived_wait(net, state, p, counts[p] - 1, w);
    const CostTerms terms = cost_terms(net, users[i], *a, state.t, wait, w);
    row.travel += terms.travel + terms.waiting;
    row.charging += terms.charging;
    row.penalty += terms.penalty;
  }
  row.total = row.travel + row.charging + row.penalty;
}

}  // namespace

RoundResult consensus_round(const Network& net, const SystemState& state,
                            std::span<const EvUser> users, const MultiplierState& m,
                            const CostWeights& w, const Profile& previous, unsigned workers) {
  const std::size_t pools = net.pool_count();
  const std::size_t n = users.size();
  if (!previous.empty() && previous.size() != n) throw ContractViolation("profile size mismatch");
  RoundResult out;
  out.profile.assign(n, std::nullopt);
  out.costs.assign(n, 0.0);
  const Profile prev = previous.empty() ? Profile(n) : previous;
  const std::vector<int> prev_counts = pool_counts(prev, pools);

  parallel_for(n, workers, [&](std::size_t i) {
    std::vector<int> others = prev_counts;
    if (prev[i] && prev[i]->pool) others[*prev[i]->pool] -= 1;
    auto a = best_response(net, users[i], state, others, w, m.view(i));
    out.profile[i] = a;
    out.costs[i] = a ? penalized_cost(net, users[i], *a, state, others, w, m.view(i)) : 0.0;
  });

  const std::vector<int> counts = pool_counts(out.profile, pools);
  TraceRow& row = out.row;
  row.iter = m.z + 1;
  price_profile(net, state, users, out.profile, w, row);
  row.max_violation = 0.0;
  out.violations.assign(n * pools, 0.0);
  for (std::size_t p = 0; p < pools; ++p) {
    if (net.pool(p).capacity <= 0) continue;
    const double g = constraint_violation(0, counts[p], state.free_spots(p));
    row.max_violation = std::max(row.max_violation, g);
    for (std::size_t i = 0; i < n; ++i) out.violations[i * pools + p] = g;
  }
  return out;
}

std::vector<int> accept_moves(const Network& net, const SystemState& state,
                              std::span<const EvUser> users, const MultiplierState& m,
                              const CostWeights& w, Profile& admitted,
                              const Profile& declared) {
  const std::size_t pools = net.pool_count();
  const std::size_t n = users.size();
  if (admitted.size() != n || declared.size() != n)
    throw ContractViolation("profile size mismatch");
  std::vector<int> counts = pool_counts(admitted, pools);
  auto others_of = [&](std::size_t i) {
    std::vector<int> o = counts;
    if (admitted[i] && admitted[i]->pool) o[*admitted[i]->pool] -= 1;
    return o;
  };
  auto cost_of = [&](std::size_t i, const std::optional<Action>& a,
                     const std::vector<int>& others) {
    if (!a) return kInfeasibleCost;
    return penalized_cost(net, users[i], *a, state, others, w, m.view(i));
  };

  struct Move {
    std::size_t i;
    double gain;
    double cost;
  };
  std::vector<Move> moves;
  for (std::size_t i = 0; i < n; ++i) {
    if (declared[i] == admitted[i] || !declared[i]) continue;
    const auto others = others_of(i);
    const double now = cost_of(i, admitted[i], others);
    const double next = cost_of(i, declared[i], others);
    moves.push_back({i, std::isinf(now) ? kInfeasibleCost : now - next, next});
  }
  std::sort(moves.begin(), moves.end(), [&](const Move& a, const Move& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.cost != b.cost) return a.cost < b.cost;
    return users[a.i].id < users[b.i].id;
  });

  std::vector<int> refused;
  for (const auto& mv : moves) {
    const std::size_t i = mv.i;
    const Action& target = *declared[i];
    const auto others = others_of(i);
    bool ok = true;
    if (target.pool && others[*target.pool] + 1 > state.free_spots(*target.pool)) ok = false;
    if (ok && admitted[i]) {
      const double now = cost_of(i, admitted[i], others);
      ok = cost_of(i, declared[i], others) < now - 1e-12;
    }
    if (!ok) {
      refused.push_back(users[i].id);
      continue;
    }
    if (admitted[i] && admitted[i]->pool) counts[*admitted[i]->pool] -= 1;
    if (target.pool) counts[*target.pool] += 1;
    admitted[i] = target;
  }
  std::sort(refused.begin(), refused.end());
  return refused;
}

GneResult run_gne(const Network& net, const SystemState& state, std::span<const EvUser> users,
                  const CostWeights& w, const GneConfig& cfg) {
  cfg.validate();
  GneResult res;
  const std::size_t pools = net.pool_count();
  MultiplierState m = MultiplierState::initial(users.size(), pools, cfg.rho0, cfg.u0);
  res.last_used = m;
  if (users.empty()) {
    res.multipliers = m;
    return res;
  }
  Profile admitted(users.size());
  std::optional<double> last_total;
  for (int z = 1; z <= cfg.max_iters; ++z) {
    RoundResult round = consensus_round(net, state, users, m, w, admitted, cfg.workers);
    Profile next = admitted;
    res.evicted = accept_moves(net, state, users, m, w, next, round.profile);
    round.row.occupancy = occupancy_of(state, next);
    if (!res.trace.empty()) {
      std::vector<int> diff(pools);
      for (std::size_t p = 0; p < pools; ++p)
        diff[p] = round.row.occupancy[p] - res.trace.back().occupancy[p];
      round.row.marginal = diff;
    }
    res.last_used = m;
    m = update_multipliers(m, round.violations, cfg.growth);
    admitted = std::move(next);
    res.iterations = z;
    const double total = round.row.total;
    res.trace.push_back(std::move(round.row));
    if (last_total) {
      const double denom = std::abs(*last_total);
      const double change = denom > 0.0 ? std::abs(total - *last_total) / denom
                                        : (total == 0.0 ? 0.0 : 1.0);
      if (change < cfg.rel_tol) break;
    }
    last_total = total;
  }
  res.multipliers = m;
  res.profile = admitted;
  for (const auto& a : admitted)
    if (a) res.actions.push_back(*a);
  return res;
}

namespace {

/// min ||A x + c||^2 subject to x >= 0 for a 2-row system, by cyclic
/// coordinate descent (exact minimization per coordinate).
std::vector<double> nnls2(const std::vector<std::array<double, 2>>& cols,
                          std::array<double, 2> c) {
  std::vector<double> x(cols.size(), 0.0);
  std::array<double, 2> r = c;
  for (int sweep = 0; sweep < 2000; ++sweep) {
    double moved = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double aa = cols[j][0] * cols[j][0] + cols[j][1] * cols[j][1];
      if (aa == 0.0) continue;
      const double grad = cols[j][0] * r[0] + cols[j][1] * r[1];
      const double xn = std::max(0.0, x[j] - grad / aa);
      const double d = xn - x[j];
      if (d != 0.0) {
        r[0] += d * cols[j][0];
        r[1] += d * cols[j][1];
        x[j] = xn;
        moved = std::max(moved, std::abs(d));
      }
    }
    if (moved < 1e-15) break;
  }
  return x;
}

}  // namespace

KktReport check_kkt_residuals(const Network& net, const SystemState& state,
                              std::span<const EvUser> users, const Profile& profile,
                              const MultiplierState& m, const CostWeights& w) {
  if (profile.size() != users.size()) throw ContractViolation("profile size mismatch");
  const std::size_t pools = net.pool_count();
  const std::vector<int> counts = pool_counts(profile, pools);
  const double lots = static_cast<double>(net.facilities.size());
  KktReport report;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const EvUser& u = users[i];
    const auto& a = profile[i];
    KktUserReport ur;
    ur.user = u.id;
    const bool charging = a && a->pool;

    double objective_terms = 0.0;
    double penalty_terms = 0.0;
    for (std::size_t p = 0; p < pools; ++p) {
      if (net.pool(p).capacity <= 0) continue;
      const double g = constraint_violation(0, counts[p], state.free_spots(p));
      const double u_ip = m.u.empty() ? 0.0 : m.u[i * pools + p];
      const double eta = u_ip * std::exp(std::min(m.rho * g, w.exp_cap));
      ur.max_complementarity = std::max(ur.max_complementarity, std::abs(eta * g));
      penalty_terms += penalty_term(u_ip, m.rho, g, w.exp_cap);
    }
    if (charging) {
      const PoolIndex p = *a->pool;
      const double wait = perceived_wait(net, state, p, counts[p] - 1, w);
      objective_terms = cost_terms(net, u, *a, state.t, wait, w).total();
    }

    // Unknowns: nu1 (single choice), sum of nu2 over pools with n = M y = 0,
    // nu3 (threshold at the chosen lot), sum of nu4 over lots.
    std::vector<std::array<double, 2>> cols;
    const double kk = static_cast<double>(kChargerTypes);
    if (charging) cols.push_back({lots * kk, 0.0});  // nu1 active: sum y = 1
    const bool has_idle_pool = pools > (charging ? 1u : 0u);
    if (has_idle_pool) cols.push_back({-w.big_m, 1.0});
    if (charging) {
      const double rate = w.pi * (pool_type(*a->pool) + 1);
      const double threshold_slack = u.soc_threshold - u.soc - rate * a->duration;
      if (std::abs(threshold_slack) < 1e-9) cols.push_back({rate, 0.0});
    }
    cols.push_back({0.0, -w.pi * kk});
    const std::array<double, 2> c{objective_terms + penalty_terms, objective_terms};
    const auto x = nnls2(cols, c);
    double r0 = c[0], r1 = c[1];
    for (std::size_t j = 0; j < cols.size(); ++j) {
      r0 += cols[j][0] * x[j];
      r1 += cols[j][1] * x[j];
    }
    ur.stationarity_objective = r0;
    ur.stationarity_duration = r1;
    // The nu products vanish by construction: only active constraints carry
    // a multiplier.
    report.max_complementarity = std::max(report.max_complementarity, ur.max_complementarity);
    report.max_stationarity =
        std::max({report.max_stationarity, std::abs(r0), std::abs(r1)});
    report.users.push_back(ur);
  }
  return report;
}

}  // namespace evsched
