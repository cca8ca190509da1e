#pragma once

#include <filesystem>
#include <vector>

#include "evsched/demand.hpp"
#include "evsched/errors.hpp"
#include "evsched/network.hpp"
#include "evsched/scenario.hpp"

namespace fixtures {

inline std::filesystem::path preset(const char* name) {
  return std::filesystem::path(EVSCHED_SOURCE_DIR) / "presets" / name;
}

/// One origin (1), one destination (2), lots 10.. with the given pools.
/// Each lot: slow capacity, fast capacity, slow price, fast price.
struct LotSpec {
  int slow = 1;
  int fast = 0;
  double slow_price = 1.0;
  double fast_price = 2.0;
  double to = 1.0;
  double from = 1.0;
};

inline evsched::Network line_network(const std::vector<LotSpec>& lots) {
  evsched::Network net;
  net.nodes = {1, 2};
  net.origins = {1};
  net.destinations = {2};
  for (std::size_t j = 0; j < lots.size(); ++j) {
    const int lot = 10 + static_cast<int>(j);
    net.nodes.push_back(lot);
    evsched::Facility f;
    f.lot = lot;
    f.chargers[evsched::kSlow] = {lots[j].slow, 1.0, 1.0};
    f.chargers[evsched::kFast] = {lots[j].fast, 1.0, 1.0};
    f.prices = {{lots[j].slow_price, lots[j].fast_price}};
    net.facilities.push_back(f);
    net.drive_cost_to_lot[{1, lot}] = lots[j].to;
    net.drive_cost_from_lot[{lot, 2}] = lots[j].from;
    net.onward_miles[{lot, 2}] = 20.0;
  }
  return net;
}

inline evsched::EvUser user(int id, double soc, double threshold, int psi, int arrival = 0) {
  evsched::EvUser u;
  u.id = id;
  u.origin = 1;
  u.destination = 2;
  u.arrival_period = arrival;
  u.soc = soc;
  u.soc_threshold = threshold;
  u.parking_duration = psi;
  return u;
}

}  // namespace fixtures
