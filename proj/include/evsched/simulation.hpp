#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evsched/benchmark.hpp"
#include "evsched/gne.hpp"
#include "evsched/mcts.hpp"
#include "evsched/oracle.hpp"
#include "evsched/scenario.hpp"
#include "evsched/schedule.hpp"

namespace evsched {

enum class RunMode { consensus, priority, both, oracle };

RunMode parse_run_mode(const std::string& s);
std::string to_string(RunMode mode);

struct SocRow {
  int t = 0;
  int lot = 0;
  double mean_soc = 0.0;  // after this period's delivery, over users charging at the lot
};

struct ChoiceRow {
  int t = 0;
  int user = 0;
  PoolIndex pool = 0;
  int duration = 0;
  int parking_periods = 0;  // min(psi, T - t) when the choice was made
};

struct PeriodTrace {
  int t = 0;
  std::vector<TraceRow> rows;  // one per GNE iteration
};

/// One scheduler run over the whole horizon.
struct ModeReport {
  std::string mode;
  std::vector<EvUser> users;          // every user as it arrived
  std::vector<Assignment> schedule;   // served users only
  ScheduleEvaluation evaluation;
  std::vector<PeriodTrace> gne;       // consensus mode only
  std::vector<SocRow> soc;
  std::vector<ChoiceRow> choices;     // consensus mode only
  std::vector<QueueEvent> queue_log;  // priority mode only
  std::vector<std::string> audit_failures;
  double cpu_seconds = 0.0;
  double mcts_value = 0.0;       // sum of root estimates over periods
  double mcts_lower_bound = 0.0; // sum of root lower bounds over periods
  long sh_shots = 0;
  long sh_rejected = 0;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::vector<ModeReport> modes;
  std::optional<OracleResult> oracle;
  std::vector<std::string> audit_failures;  // from every mode

  bool ok() const { return audit_failures.empty(); }
  const ModeReport* find(const std::string& mode) const;
};

struct RunOptions {
  unsigned workers = 1;
};

/// Every user arriving over the horizon: the fixed list when the scenario
/// has one, otherwise Poisson arrivals drawn from the "demand" stream.
std::vector<std::vector<EvUser>> arrivals_by_period(const ScenarioConfig& cfg);

/// Simulates all T periods. Each period: consensus runs the GNE loop and
/// then the tree search seeded with its profile; priority runs the FCFS
/// baseline. Delivered energy is drawn per (user, period) from the "rates"
/// stream, so paired modes see identical arrivals and rates.
RunReport run_scenario(const ScenarioConfig& cfg, RunMode mode, const RunOptions& opt = {});

/// Writes iterations.csv, occupancy.csv, schedule.csv, soc.csv,
/// mcts_choices.csv and comparison.csv. In `both` mode the priority run's
/// schedule and SOC files go to a `priority` subdirectory.
void write_report(const RunReport& report, const ScenarioConfig& cfg,
                  const std::filesystem::path& dir);

/// GNE trace summed over periods, iteration by iteration. A period that
/// stopped early repeats its last row.
std::vector<TraceRow> aggregate_iterations(const std::vector<PeriodTrace>& traces);

struct SweepRow {
  std::string value;
  double total = 0.0;
  double travel = 0.0;
  double charging_penalty = 0.0;
};

/// Names accepted by sensitivity_sweep.
const std::vector<std::string>& sweep_parameters();

/// Applies one sweep value to a copy of the scenario. Throws
/// ValidationError on an unknown parameter or malformed value.
ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& parameter,
                              const std::string& value);

/// Runs the consensus scheduler once per value at the scenario's seed.
std::vector<SweepRow> sensitivity_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                                        const std::vector<std::string>& values,
                                        const RunOptions& opt = {});

void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& file);

}  // namespace evsched
