#include "evsched/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <stdexcept>

#include "evsched/errors.hpp"
#include "evsched/state.hpp"

namespace evsched {

RunMode parse_run_mode(const std::string& s) {
  if (s == "consensus") return RunMode::consensus;
  if (s == "priority") return RunMode::priority;
  if (s == "both") return RunMode::both;
  if (s == "oracle") return RunMode::oracle;
  throw ValidationError("mode must be consensus, priority, both or oracle, got '" + s + "'");
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::consensus: return "consensus";
    case RunMode::priority: return "priority";
    case RunMode::both: return "both";
    case RunMode::oracle: return "oracle";
  }
  return "consensus";
}

const ModeReport* RunReport::find(const std::string& mode) const {
  for (const auto& m : modes)
    if (m.mode == mode) return &m;
  return nullptr;
}

std::vector<std::vector<EvUser>> arrivals_by_period(const ScenarioConfig& cfg) {
  std::vector<std::vector<EvUser>> out(static_cast<std::size_t>(cfg.horizon));
  if (cfg.users) {
    for (const auto& u : *cfg.users) out[static_cast<std::size_t>(u.arrival_period)].push_back(u);
    return out;
  }
  DemandGenerator gen(cfg.effective_demand(), 1);
  Rng rng = make_stream(cfg.seed, "demand");
  for (int t = 0; t < cfg.horizon; ++t)
    out[static_cast<std::size_t>(t)] = gen.generate_arrivals(cfg.net, t, rng);
  return out;
}

namespace {

double cpu_now() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

ModeReport simulate(const ScenarioConfig& cfg, bool consensus, const RunOptions& opt) {
  const Network& net = cfg.net;
  const CostWeights& w = cfg.weights;
  const int horizon = cfg.horizon;
  const auto arrivals = arrivals_by_period(cfg);

  ModeReport r;
  r.mode = consensus ? "consensus" : "priority";
  for (const auto& batch : arrivals) r.users.insert(r.users.end(), batch.begin(), batch.end());

  GneConfig gcfg = cfg.gne;
  gcfg.workers = opt.workers;
  MctsConfig mcfg = cfg.mcts;
  mcfg.workers = opt.workers;
  std::optional<PriorityScheduler> priority;
  if (!consensus) priority.emplace(net, w);

  const double start = cpu_now();
  SystemState state = initial_state(net, 0, horizon, arrivals[0], cfg.background, w.max_wait);
  for (int t = 0; t < horizon; ++t) {
    std::vector<Action> actions;
    if (consensus) {
      std::vector<EvUser> users;
      for (const EvUser* u : state.uncommitted_users()) users.push_back(*u);
      if (!users.empty()) {
        const GneResult gne = run_gne(net, state, users, w, gcfg);
        r.gne.push_back(PeriodTrace{t, gne.trace});
        const MctsResult m = run_mcts(net, state, w, cfg.rates, mcfg, gne.actions,
                                      derive_seed(cfg.seed, "mcts", {static_cast<std::uint64_t>(t)}));
        actions = m.actions;
        r.mcts_value += m.value;
        r.mcts_lower_bound += m.lower_bound;
        r.sh_shots += m.stats.sh_shots;
        r.sh_rejected += m.stats.sh_rejected;
        for (const auto& a : actions) {
          if (!a.pool) continue;
          const EvUser* u = state.find_user(a.user);
          r.choices.push_back({t, a.user, *a.pool, a.duration,
                               std::min(u->parking_duration, horizon - t)});
        }
      }
    } else {
      actions = priority->decide(state);
    }
    for (const auto& a : actions)
      if (a.pool) r.schedule.push_back(Assignment{a.user, t, a.pool, a.duration});

    ExogenousInfo exo;
    if (t + 1 < horizon) exo.arrivals = arrivals[static_cast<std::size_t>(t + 1)];
    std::map<int, std::pair<double, int>> lot_soc;
    for (const auto& [id, p] : charging_users(state, actions)) {
      Rng rr = make_stream(cfg.seed, "rates",
                           {static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(t)});
      const double kwh = cfg.rates.sample(pool_type(p), rr);
      exo.delivered[{id, t}] = kwh;
      const EvUser* u = state.find_user(id);
      auto& acc = lot_soc[net.pool_lot(p)];
      acc.first += std::min(u->battery_capacity, u->soc + kwh);
      ++acc.second;
    }
    for (const auto& [lot, acc] : lot_soc) r.soc.push_back({t, lot, acc.first / acc.second});

    try {
      state = advance(net, state, actions, exo, w.max_wait);
      check_spot_conservation(net, state);
    } catch (const ContractViolation& e) {
      r.audit_failures.push_back(r.mode + " t=" + std::to_string(t) + ": " + e.what());
      break;
    }
  }
  r.cpu_seconds = cpu_now() - start;

  std::vector<int> background = cfg.background;
  if (background.empty()) background.assign(net.pool_count(), 0);
  r.evaluation = evaluate_schedule(net, r.users, horizon, background, r.schedule, w);
  for (const auto& v : r.evaluation.violations) r.audit_failures.push_back(r.mode + ": " + v);
  if (priority) {
    r.queue_log = priority->log();
    for (const auto& v : audit_queue_log(r.queue_log))
      r.audit_failures.push_back(r.mode + " queue: " + v);
  }
  return r;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& file, const char* header) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write " + file.string());
  out << header << '\n';
  return out;
}

void write_schedule(const ModeReport& m, const Network& net, const std::filesystem::path& file) {
  auto out = open_csv(file, "user,t,lot,type,n,wait_periods,cost,served_flag");
  std::map<int, int> arrival;
  for (const auto& u : m.users) arrival[u.id] = u.arrival_period;
  for (const auto& row : m.evaluation.rows) {
    out << row.user << ',';
    if (row.pool) {
      out << row.start << ',' << net.pool_lot(*row.pool) << ',' << pool_type(*row.pool) << ','
          << row.duration;
    } else {
      out << arrival[row.user] << ",,,0";
    }
    out << ',' << row.wait_periods << ',' << num(row.total) << ','
        << (row.outcome == ServiceOutcome::served ? 1 : 0) << '\n';
  }
}

void write_soc(const ModeReport& m, const std::filesystem::path& file) {
  auto out = open_csv(file, "t,lot,mean_soc");
  for (const auto& s : m.soc) out << s.t << ',' << s.lot << ',' << num(s.mean_soc) << '\n';
}

}  // namespace

std::vector<TraceRow> aggregate_iterations(const std::vector<PeriodTrace>& traces) {
  std::size_t iters = 0;
  for (const auto& p : traces) iters = std::max(iters, p.rows.size());
  std::vector<TraceRow> out(iters);
  for (std::size_t z = 0; z < iters; ++z) {
    out[z].iter = static_cast<int>(z + 1);
    for (const auto& p : traces) {
      if (p.rows.empty()) continue;
      const TraceRow& row = p.rows[std::min(z, p.rows.size() - 1)];
      out[z].total += row.total;
      out[z].travel += row.travel;
      out[z].charging += row.charging;
      out[z].penalty += row.penalty;
      out[z].max_violation = std::max(out[z].max_violation, row.max_violation);
    }
  }
  return out;
}

RunReport run_scenario(const ScenarioConfig& cfg, RunMode mode, const RunOptions& opt) {
  cfg.validate();
  RunReport report;
  report.seed = cfg.seed;
  if (mode == RunMode::oracle) {
    const MicroScenario ms = micro_from_scenario(cfg);
    report.oracle = brute_force(ms, cfg.weights);
    if (report.oracle->feasible)
      for (const auto& v : report.oracle->evaluation.violations)
        report.audit_failures.push_back("oracle: " + v);
    return report;
  }
  if (mode == RunMode::consensus || mode == RunMode::both)
    report.modes.push_back(simulate(cfg, true, opt));
  if (mode == RunMode::priority || mode == RunMode::both)
    report.modes.push_back(simulate(cfg, false, opt));
  for (const auto& m : report.modes)
    report.audit_failures.insert(report.audit_failures.end(), m.audit_failures.begin(),
                                 m.audit_failures.end());
  return report;
}

void write_report(const RunReport& report, const ScenarioConfig& cfg,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Network& net = cfg.net;

  if (report.oracle) {
    auto out = open_csv(dir / "oracle.csv", "user,t,lot,type,n,cost");
    if (report.oracle->feasible) {
      for (const auto& row : report.oracle->evaluation.rows) {
        out << row.user << ',';
        if (row.pool)
          out << row.start << ',' << net.pool_lot(*row.pool) << ',' << pool_type(*row.pool)
              << ',' << row.duration;
        else
          out << ",,,0";
        out << ',' << num(row.total) << '\n';
      }
    }
  }

  if (report.modes.empty()) return;
  auto comparison = open_csv(dir / "comparison.csv", "mode,total_obj,cpu_seconds");
  for (const auto& m : report.modes)
    comparison << m.mode << ',' << num(m.evaluation.total) << ',' << num(m.cpu_seconds) << '\n';

  for (const auto& m : report.modes) {
    const bool primary = &m == &report.modes.front();
    const std::filesystem::path base = primary ? dir : dir / m.mode;
    std::filesystem::create_directories(base);
    write_schedule(m, net, base / "schedule.csv");
    write_soc(m, base / "soc.csv");
    if (m.mode != "consensus") continue;

    auto iters = open_csv(base / "iterations.csv",
                          "iter,total_obj,travel,charging,penalty,max_violation");
    for (const auto& row : aggregate_iterations(m.gne))
      iters << row.iter << ',' << num(row.total) << ',' << num(row.travel) << ','
            << num(row.charging) << ',' << num(row.penalty) << ',' << num(row.max_violation)
            << '\n';

    auto occ = open_csv(base / "occupancy.csv", "iter,t,lot,type,occupancy,marginal");
    for (const auto& period : m.gne)
      for (const auto& row : period.rows)
        for (PoolIndex p = 0; p < row.occupancy.size(); ++p) {
          if (net.pool(p).capacity <= 0) continue;
          occ << row.iter << ',' << period.t << ',' << net.pool_lot(p) << ',' << pool_type(p)
              << ',' << row.occupancy[p] << ',' << (row.marginal ? (*row.marginal)[p] : 0)
              << '\n';
        }

    auto choices = open_csv(base / "mcts_choices.csv", "t,user,lot,type,n,parking_periods");
    for (const auto& c : m.choices)
      choices << c.t << ',' << c.user << ',' << net.pool_lot(c.pool) << ',' << pool_type(c.pool)
              << ',' << c.duration << ',' << c.parking_periods << '\n';
  }
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"alpha_over", "iota",   "H",
                                              "N",          "xi",     "demand_level"};
  return names;
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& parameter,
                              const std::string& value) {
  ScenarioConfig out = cfg;
  auto as_double = [&] {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("sweep value '" + value + "' for " + parameter + " is not a number");
    }
  };
  auto as_int = [&] {
    const double v = as_double();
    if (v != std::floor(v)) throw ValidationError("sweep value '" + value + "' for " + parameter +
                                                  " must be an integer");
    return static_cast<int>(v);
  };
  if (parameter == "alpha_over")
    out.weights.alpha_over = as_double();
  else if (parameter == "iota")
    out.mcts.exploration = as_double();
  else if (parameter == "H")
    out.mcts.horizon = as_int();
  else if (parameter == "N")
    out.mcts.iterations = as_int();
  else if (parameter == "xi")
    out.mcts.sh_samples = as_int();
  else if (parameter == "demand_level")
    out.level = parse_demand_level(value);
  else
    throw ValidationError("unknown sweep parameter '" + parameter +
                          "' (expected alpha_over, iota, H, N, xi or demand_level)");
  out.validate();
  return out;
}

std::vector<SweepRow> sensitivity_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                                        const std::vector<std::string>& values,
                                        const RunOptions& opt) {
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    const ScenarioConfig c = with_parameter(cfg, parameter, v);
    const RunReport r = run_scenario(c, RunMode::consensus, opt);
    if (!r.ok()) throw ContractViolation("audit failure in sweep at " + parameter + "=" + v +
                                         ": " + r.audit_failures.front());
    const auto& ev = r.modes.front().evaluation;
    rows.push_back({v, ev.total, ev.travel, ev.charging + ev.penalty});
  }
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto out = open_csv(file, "value,total,travel,charging_penalty");
  for (const auto& r : rows)
    out << r.value << ',' << num(r.total) << ',' << num(r.travel) << ','
        << num(r.charging_penalty) << '\n';
}

}  // namespace evsched
