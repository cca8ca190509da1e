#include "evsched/demand.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evsched/errors.hpp"

namespace evsched {

double DemandProfile::arrival_rate(int t) const {
  for (const auto& b : bands)
    if (t >= b.first_period && t <= b.last_period) return b.mean_arrivals * scale;
  return 0.0;
}

void DemandProfile::validate(int horizon) const {
  if (!(scale >= 0.0)) throw ValidationError("demand.scale must be >= 0");
  if (!(soc_low_fraction >= 0.0 && soc_low_fraction <= soc_high_fraction &&
        soc_high_fraction <= 1.0))
    throw ValidationError("demand: need 0 <= soc_low_fraction <= soc_high_fraction <= 1");
  if (!(battery_capacity > 0.0)) throw ValidationError("demand.battery_kwh must be > 0");
  if (!(duration_mean > 0.0)) throw ValidationError("demand.duration_mean must be > 0");
  if (!(efficiency > 0.0)) throw ValidationError("demand.efficiency must be > 0");
  if (!(reserve >= 0.0)) throw ValidationError("demand.reserve_kwh must be >= 0");
  int expect = 0;
  auto sorted = bands;
  std::sort(sorted.begin(), sorted.end(),
            [](const DemandBand& a, const DemandBand& b) { return a.first_period < b.first_period; });
  for (const auto& b : sorted) {
    if (b.first_period != expect || b.last_period < b.first_period)
      throw ValidationError("demand.bands must partition [0, T-1]; gap or overlap at period " +
                            std::to_string(expect));
    if (!(b.mean_arrivals >= 0.0)) throw ValidationError("demand.bands: mean must be >= 0");
    expect = b.last_period + 1;
  }
  if (expect != horizon)
    throw ValidationError("demand.bands must cover [0, T-1]; coverage ends at " +
                          std::to_string(expect - 1));
}

double required_soc(double miles, double battery_capacity, const DemandProfile& profile) {
  const double q = std::max(miles, 0.0) / profile.efficiency + profile.reserve;
  return std::min(battery_capacity, q);
}

double required_soc(const Network& net, int destination, double battery_capacity,
                    const DemandProfile& profile) {
  double miles = -1.0;
  for (const auto& [key, m] : net.onward_miles)
    if (key.second == destination) miles = std::max(miles, m);
  if (miles < 0.0 || miles > profile.max_onward_miles) miles = profile.max_onward_miles;
  return required_soc(miles, battery_capacity, profile);
}

std::vector<EvUser> DemandGenerator::generate_arrivals(const Network& net, int t, Rng& rng) {
  std::vector<EvUser> out;
  const int count = poisson(rng, profile_.arrival_rate(t));
  if (count == 0 || net.origins.empty() || net.destinations.empty()) return out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    EvUser u;
    u.id = next_id_++;
    u.arrival_period = t;
    u.origin = net.origins[static_cast<std::size_t>(
        uniform01(rng) * static_cast<double>(net.origins.size()))];
    u.destination = net.destinations[static_cast<std::size_t>(
        uniform01(rng) * static_cast<double>(net.destinations.size()))];
    u.battery_capacity = profile_.battery_capacity;
    const double frac = profile_.soc_low_fraction +
                        (profile_.soc_high_fraction - profile_.soc_low_fraction) * uniform01(rng);
    u.soc = frac * u.battery_capacity;
    u.parking_duration =
        std::max(1, static_cast<int>(std::lround(exponential(rng, profile_.duration_mean))));
    u.soc_threshold = required_soc(net, u.destination, u.battery_capacity, profile_);
    out.push_back(u);
  }
  return out;
}

}  // namespace evsched
