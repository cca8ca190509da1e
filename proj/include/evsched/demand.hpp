#pragma once

#include <vector>

#include "evsched/network.hpp"
#include "evsched/rng.hpp"

namespace evsched {

/// One charging customer.
struct EvUser {
  int id = 0;
  int origin = 0;
  int destination = 0;
  int arrival_period = 0;
  double soc = 0.0;               // b_i^t, kWh
  double battery_capacity = 50.0; // kWh
  int parking_duration = 1;       // psi_i, periods
  double soc_threshold = 0.0;     // Q_i, kWh

  bool needs_charge() const { return soc < soc_threshold; }
  bool operator==(const EvUser&) const = default;
};

struct DemandBand {
  int first_period = 0;
  int last_period = 0;  // inclusive
  double mean_arrivals = 0.0;
};

struct DemandProfile {
  std::vector<DemandBand> bands;
  double scale = 1.0;  // demand level multiplier (0.5 low, 1 medium, 2 high)
  double soc_low_fraction = 0.2;
  double soc_high_fraction = 0.6;
  double battery_capacity = 50.0;
  double duration_mean = 4.0;  // periods
  double efficiency = 2.91;    // miles per kWh
  double reserve = 1.0;        // kWh
  double max_onward_miles = 48.0;

  /// Mean arrivals per period at period t after scaling; 0 outside all bands.
  double arrival_rate(int t) const;

  /// Bands must partition [0, horizon-1] and carry non-negative means.
  void validate(int horizon) const;
};

/// Q_i for a trip of `miles` onward distance.
double required_soc(double miles, double battery_capacity, const DemandProfile& profile);

/// Q_i from the network's onward-distance table: the largest onward distance
/// from any facility to `destination`, capped by the profile's declared upper
/// bound (which is also used when the table has no entry).
double required_soc(const Network& net, int destination, double battery_capacity,
                    const DemandProfile& profile);

/// Issues users with strictly increasing ids across calls.
class DemandGenerator {
 public:
  explicit DemandGenerator(DemandProfile profile, int first_id = 0)
      : profile_(std::move(profile)), next_id_(first_id) {}

  /// D-hat^t: Poisson count, uniform O x Delta, uniform initial SOC,
  /// exponential parking duration rounded to >= 1 period.
  std::vector<EvUser> generate_arrivals(const Network& net, int t, Rng& rng);

  int next_id() const { return next_id_; }
  const DemandProfile& profile() const { return profile_; }

 private:
  DemandProfile profile_;
  int next_id_;
};

}  // namespace evsched
