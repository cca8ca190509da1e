#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evsched/demand.hpp"
#include "evsched/gne.hpp"
#include "evsched/mcts.hpp"
#include "evsched/network.hpp"
#include "evsched/oracle.hpp"
#include "evsched/sh.hpp"
#include "evsched/user_opt.hpp"

namespace evsched {

enum class DemandLevel { low, medium, high };

DemandLevel parse_demand_level(const std::string& s);
std::string to_string(DemandLevel level);
/// 0.5, 1 or 2.
double demand_multiplier(DemandLevel level);

struct ScenarioConfig {
  std::string name = "scenario";
  int horizon = 19;             // T
  double period_minutes = 30.0;
  std::uint64_t seed = 1;
  Network net;
  DemandProfile demand;         // scale here is the base scale, before the level
  DemandLevel level = DemandLevel::medium;
  CostWeights weights;
  RateModel rates;
  GneConfig gne;
  MctsConfig mcts;
  /// Fixed user list; when set, no random arrivals are generated.
  std::optional<std::vector<EvUser>> users;
  std::vector<int> background;  // per pool; empty means all free

  /// Demand profile with the level multiplier applied.
  DemandProfile effective_demand() const;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Parses a scenario document. Missing fields keep their defaults; type
/// errors and invalid values are reported with their field path.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Scenario running a micro-instance with nominal rates.
ScenarioConfig scenario_from_micro(const MicroScenario& ms, const CostWeights& w);

/// Micro-instance view of a scenario with a fixed user list.
MicroScenario micro_from_scenario(const ScenarioConfig& cfg);

}  // namespace evsched
