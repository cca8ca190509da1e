#include "evsched/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "evsched/errors.hpp"

namespace evsched {

namespace {

std::string pair_name(const char* a, int x, const char* b, int y) {
  return std::string("(") + a + "=" + std::to_string(x) + ", " + b + "=" +
         std::to_string(y) + ")";
}

void check_cost(const std::map<std::pair<int, int>, double>& table,
                std::pair<int, int> key, const char* a, const char* b) {
  auto it = table.find(key);
  if (it == table.end())
    throw ValidationError("missing cost entry " + pair_name(a, key.first, b, key.second));
  if (!std::isfinite(it->second) || it->second < 0.0)
    throw ValidationError("cost entry " + pair_name(a, key.first, b, key.second) +
                          " must be finite and non-negative");
}

}  // namespace

double Facility::price(int t, int k) const {
  if (prices.empty()) return 0.0;
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0)),
                                         prices.size() - 1);
  return prices[idx][static_cast<std::size_t>(k)];
}

std::optional<std::size_t> Network::facility_of_lot(int lot) const {
  for (std::size_t f = 0; f < facilities.size(); ++f)
    if (facilities[f].lot == lot) return f;
  return std::nullopt;
}

void Network::validate(int horizon) const {
  const std::set<int> node_set(nodes.begin(), nodes.end());
  if (node_set.size() != nodes.size()) throw ValidationError("duplicate node id");
  for (int o : origins)
    if (!node_set.count(o)) throw ValidationError("origin " + std::to_string(o) + " is not a node");
  for (int d : destinations)
    if (!node_set.count(d))
      throw ValidationError("destination " + std::to_string(d) + " is not a node");

  std::set<int> lots;
  for (const auto& f : facilities) {
    const std::string where = "facility at lot " + std::to_string(f.lot);
    if (!node_set.count(f.lot)) throw ValidationError(where + ": lot is not a node");
    if (!lots.insert(f.lot).second) throw ValidationError(where + ": duplicate lot id");
    for (const auto& c : f.chargers) {
      if (c.capacity < 0) throw ValidationError(where + ": negative capacity");
      if (!(c.search_time > 0.0)) throw ValidationError(where + ": search_time must be > 0");
      if (c.awareness < 0.0 || c.awareness > 1.0)
        throw ValidationError(where + ": awareness must lie in [0, 1]");
    }
    for (int t = 0; t < horizon; ++t)
      for (int k = 0; k < kChargerTypes; ++k)
        if (!(f.price(t, k) >= 0.0)) throw ValidationError(where + ": negative price");
  }

  for (int o : origins)
    for (const auto& f : facilities) check_cost(drive_cost_to_lot, {o, f.lot}, "o", "j");
  for (const auto& f : facilities)
    for (int d : destinations) check_cost(drive_cost_from_lot, {f.lot, d}, "j", "d");
}

namespace {

std::vector<int> int_list(const nlohmann::json& j, const char* key) {
  std::vector<int> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<int>());
  return out;
}

void read_table(const nlohmann::json& section, const char* key, const char* a,
                const char* b, const char* value,
                std::map<std::pair<int, int>, double>& out) {
  if (!section.contains(key)) return;
  for (const auto& row : section.at(key))
    out[{row.at(a).get<int>(), row.at(b).get<int>()}] = row.at(value).get<double>();
}

}  // namespace

Network load_network(const nlohmann::json& section, int horizon) {
  Network net;
  try {
    net.nodes = int_list(section, "nodes");
    net.origins = int_list(section, "origins");
    net.destinations = int_list(section, "destinations");
    if (section.contains("facilities")) {
      for (const auto& fj : section.at("facilities")) {
        Facility f;
        f.lot = fj.at("lot").get<int>();
        std::array<double, kChargerTypes> flat{0.0, 0.0};
        for (const auto& cj : fj.at("chargers")) {
          const int k = cj.at("type").get<int>();
          if (k < 0 || k >= kChargerTypes)
            throw ValidationError("facility at lot " + std::to_string(f.lot) +
                                  ": charger type must be 0 or 1");
          auto& pool = f.chargers[static_cast<std::size_t>(k)];
          pool.capacity = cj.value("capacity", 0);
          pool.search_time = cj.value("search_time", 1.0);
          pool.awareness = cj.value("awareness", 1.0);
          flat[static_cast<std::size_t>(k)] = cj.value("price", 0.0);
        }
        if (fj.contains("price_schedule")) {
          for (const auto& row : fj.at("price_schedule"))
            f.prices.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
        } else {
          f.prices.push_back(flat);
        }
        net.facilities.push_back(std::move(f));
      }
    }
    read_table(section, "drive_cost_to_lot", "origin", "lot", "cost", net.drive_cost_to_lot);
    read_table(section, "drive_cost_from_lot", "lot", "destination", "cost",
               net.drive_cost_from_lot);
    read_table(section, "onward_miles", "lot", "destination", "miles", net.onward_miles);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("network: ") + e.what());
  }
  net.validate(horizon);
  return net;
}

double trip_cost(const Network& net, int origin, int lot, int destination) {
  auto to = net.drive_cost_to_lot.find({origin, lot});
  if (to == net.drive_cost_to_lot.end())
    throw LookupError("no drive cost for " + pair_name("o", origin, "j", lot));
  auto from = net.drive_cost_from_lot.find({lot, destination});
  if (from == net.drive_cost_from_lot.end())
    throw LookupError("no drive cost for " + pair_name("j", lot, "d", destination));
  return to->second + from->second;
}

}  // namespace evsched
