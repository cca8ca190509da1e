#include "evsched/sh.hpp"

#include <algorithm>
#include <cmath>

#include "evsched/errors.hpp"

namespace evsched {

double RateModel::sample(int k, Rng& rng) const {
  const double mu = mean[static_cast<std::size_t>(k)];
  if (rel_sd == 0.0) return mu;
  const double raw = std::max(0.0, mu + rel_sd * mu * standard_normal(rng));
  if (quantum <= 0.0) return raw;
  return std::round(raw / quantum) * quantum;
}

RatePath sample_rate_path(const RateModel& model, int k, int periods, Rng& rng, int index) {
  if (periods < 1) throw ContractViolation("rate path needs at least one period");
  RatePath path;
  path.index = index;
  path.samples.reserve(static_cast<std::size_t>(periods));
  for (int tau = 0; tau < periods; ++tau) path.samples.push_back(model.sample(k, rng));
  return path;
}

bool cone_feasible(double soc, int parking_duration, double threshold, double pi) {
  if (parking_duration < 1) throw ContractViolation("parking duration must be >= 1");
  if (threshold <= soc) return true;
  const double per_period = (threshold - soc) / parking_duration;
  const double tol = 1e-12 * std::max(1.0, pi);
  return per_period >= pi - tol && per_period <= 2.0 * pi + tol;
}

ShotResult shoot(double soc, int periods, double threshold, int k, int samples,
                 const RateModel& model, double battery_capacity, Rng& rng) {
  if (periods < 1 || samples < 1) throw ContractViolation("shoot needs n >= 1 and xi >= 1");
  ShotResult res;
  res.shots = samples;
  res.trajectory.assign(static_cast<std::size_t>(periods), 0.0);
  std::vector<double> shot(static_cast<std::size_t>(periods));
  int survivors = 0;
  for (int gamma = 0; gamma < samples; ++gamma) {
    double b = soc;
    for (int tau = 0; tau < periods; ++tau) {
      b = std::min(battery_capacity, b + model.sample(k, rng));
      shot[static_cast<std::size_t>(tau)] = b;
    }
    if (b < threshold) continue;
    ++survivors;
    for (std::size_t tau = 0; tau < shot.size(); ++tau) res.trajectory[tau] += shot[tau];
  }
  res.survival = static_cast<double>(survivors) / samples;
  res.feasible = survivors > 0;
  if (res.feasible) {
    for (double& v : res.trajectory) v /= survivors;
  } else {
    res.trajectory.clear();
  }
  return res;
}

double shot_value(const ShotResult& shot, double charging_cost, double overcharge_cost,
                  double alpha_over, int parking_duration) {
  return charging_cost + overcharge_cost + (1.0 - shot.survival) * alpha_over * parking_duration;
}

}  // namespace evsched
