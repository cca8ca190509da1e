#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

namespace evsched {

inline constexpr int kSlow = 0;
inline constexpr int kFast = 1;
inline constexpr int kChargerTypes = 2;

/// One charger type at one parking lot.
struct ChargerPool {
  int capacity = 0;          // c_jk
  double search_time = 1.0;  // e_jk, periods
  double awareness = 1.0;    // beta_jk in [0, 1]

  bool operator==(const ChargerPool&) const = default;
};

struct Facility {
  int lot = 0;
  std::array<ChargerPool, kChargerTypes> chargers{};
  /// Price per period for each charger type, indexed by period. A schedule
  /// shorter than the horizon repeats its last entry.
  std::vector<std::array<double, kChargerTypes>> prices;

  double price(int t, int k) const;

  bool operator==(const Facility&) const = default;
};

/// Index of a (facility, charger type) pair in flat per-pool arrays.
using PoolIndex = std::size_t;

inline PoolIndex pool_index(std::size_t facility, int k) {
  return facility * kChargerTypes + static_cast<std::size_t>(k);
}
inline std::size_t pool_facility(PoolIndex p) { return p / kChargerTypes; }
inline int pool_type(PoolIndex p) { return static_cast<int>(p % kChargerTypes); }

struct Network {
  std::vector<int> nodes;
  std::vector<int> origins;
  std::vector<int> destinations;
  std::vector<Facility> facilities;
  std::map<std::pair<int, int>, double> drive_cost_to_lot;    // (o, j) -> v_oj
  std::map<std::pair<int, int>, double> drive_cost_from_lot;  // (j, d) -> mu_jd
  std::map<std::pair<int, int>, double> onward_miles;         // (j, d) -> miles

  std::size_t pool_count() const { return facilities.size() * kChargerTypes; }
  const ChargerPool& pool(PoolIndex p) const {
    return facilities[pool_facility(p)].chargers[pool_type(p)];
  }
  int pool_lot(PoolIndex p) const { return facilities[pool_facility(p)].lot; }
  double pool_price(PoolIndex p, int t) const {
    return facilities[pool_facility(p)].price(t, pool_type(p));
  }
  std::optional<std::size_t> facility_of_lot(int lot) const;

  /// Throws ValidationError on the first broken invariant.
  void validate(int horizon) const;

  bool operator==(const Network&) const = default;
};

/// Builds and validates a Network from the `network` section of a scenario
/// document.
Network load_network(const nlohmann::json& section, int horizon);

/// v_oj + mu_jd; throws LookupError on an unknown key.
double trip_cost(const Network& net, int origin, int lot, int destination);

}  // namespace evsched
