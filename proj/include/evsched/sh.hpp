#pragma once

#include <array>
#include <vector>

#include "evsched/network.hpp"
#include "evsched/rng.hpp"

namespace evsched {

/// Delivered energy per period: Normal(mean_k, rel_sd * mean_k), truncated
/// at 0 and quantized to `quantum` kWh. rel_sd == 0 returns the mean as is.
struct RateModel {
  std::array<double, kChargerTypes> mean{6.2, 12.5};
  double rel_sd = 0.10;
  double quantum = 0.1;

  double sample(int k, Rng& rng) const;
  bool deterministic() const { return rel_sd == 0.0; }

  /// Nominal rates pi (k + 1) with no noise.
  static RateModel nominal(double pi) { return RateModel{{pi, 2.0 * pi}, 0.0, 0.1}; }
};

struct RatePath {
  int index = 0;                // gamma
  std::vector<double> samples;  // kWh delivered in periods tau = 1..n
};

RatePath sample_rate_path(const RateModel& model, int k, int periods, Rng& rng, int index = 0);

/// Band of SOC values reachable from `base` when every period adds between
/// pi and 2 pi.
struct SocCone {
  double base = 0.0;
  double slope_low = 0.0;
  double slope_high = 0.0;
  int horizon = 0;

  static SocCone from(double base, double pi, int horizon) {
    return SocCone{base, pi, 2.0 * pi, horizon};
  }
  double lower(int tau) const { return base + slope_low * tau; }
  double upper(int tau) const { return base + slope_high * tau; }
  bool contains(int tau, double soc, double tol = 1e-9) const {
    return soc >= lower(tau) - tol && soc <= upper(tau) + tol;
  }
};

/// True iff the threshold is already met or (Q - b) / psi lies in [pi, 2 pi].
bool cone_feasible(double soc, int parking_duration, double threshold, double pi);

struct ShotResult {
  bool feasible = false;            // at least one shot reached the threshold
  std::vector<double> trajectory;   // mean SOC over surviving shots, tau = 1..n
  double survival = 0.0;            // surviving shots / total shots
  int shots = 0;
};

/// Shooting heuristic: `samples` rate paths of length `periods` from `soc`,
/// SOC capped at `battery_capacity`; shots ending below `threshold` are
/// discarded and the rest averaged per period.
ShotResult shoot(double soc, int periods, double threshold, int k, int samples,
                 const RateModel& model, double battery_capacity, Rng& rng);

/// Value handed back to the tree for a commitment: the deterministic
/// charging expense and overcharge penalty of the committed duration, plus
/// alpha' * psi for the fraction of shots that missed the threshold.
double shot_value(const ShotResult& shot, double charging_cost, double overcharge_cost,
                  double alpha_over, int parking_duration);

}  // namespace evsched
