// Command-line driver: run | sweep | oracle | validate.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evsched/errors.hpp"
#include "evsched/scenario.hpp"
#include "evsched/simulation.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitAudit = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> level;
  unsigned workers = 1;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (overrides the file)");
  cmd->add_option("--demand-level", f.level, "low, medium or high")
      ->check(CLI::IsMember({"low", "medium", "high"}));
  cmd->add_option("--workers", f.workers, "threads for GNE sweeps and tree search")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory");
}

evsched::ScenarioConfig load(const CommonFlags& f) {
  evsched::ScenarioConfig cfg = evsched::load_scenario(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.level) cfg.level = evsched::parse_demand_level(*f.level);
  cfg.validate();
  return cfg;
}

int report_audits(const evsched::RunReport& r) {
  if (r.ok()) return 0;
  for (const auto& a : r.audit_failures) std::cerr << "audit: " << a << '\n';
  return kExitAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV charging scheduler: consensus + look-ahead vs first-come-first-serve"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string mode = "both";
  auto* run = app.add_subcommand("run", "simulate a scenario and write CSV reports");
  add_common(run, run_flags);
  run->add_option("--mode", mode, "consensus, priority, both or oracle")
      ->check(CLI::IsMember({"consensus", "priority", "both", "oracle"}));

  CommonFlags sweep_flags;
  std::string param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter");
  add_common(sweep, sweep_flags);
  sweep->add_option("--param", param, "alpha_over, iota, H, N, xi or demand_level")->required();
  sweep->add_option("--values", values, "values to try")->required()->delimiter(',');

  CommonFlags oracle_flags;
  auto* oracle = app.add_subcommand("oracle", "solve a micro scenario exactly");
  add_common(oracle, oracle_flags);

  CommonFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "check a scenario file and exit");
  validate->add_option("--config", validate_flags.config, "scenario file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto cfg = evsched::load_scenario(validate_flags.config);
      std::cout << cfg.name << ": ok (" << cfg.horizon << " periods, "
                << cfg.net.facilities.size() << " facilities)\n";
      return 0;
    }
    if (*run) {
      const auto cfg = load(run_flags);
      const auto report =
          evsched::run_scenario(cfg, evsched::parse_run_mode(mode), {run_flags.workers});
      evsched::write_report(report, cfg, run_flags.out);
      for (const auto& m : report.modes)
        std::printf("%-10s total %.2f  travel %.2f  charging %.2f  penalty %.2f  cpu %.2fs\n",
                    m.mode.c_str(), m.evaluation.total, m.evaluation.travel,
                    m.evaluation.charging, m.evaluation.penalty, m.cpu_seconds);
      if (report.oracle) {
        if (report.oracle->feasible)
          std::printf("oracle     total %.6f over %ld schedules\n", report.oracle->total,
                      report.oracle->schedules_checked);
        else
          std::printf("oracle     infeasible: user %d cannot reach its threshold\n",
                      *report.oracle->blocking_user);
      }
      return report_audits(report);
    }
    if (*oracle) {
      const auto cfg = load(oracle_flags);
      const auto report = evsched::run_scenario(cfg, evsched::RunMode::oracle);
      evsched::write_report(report, cfg, oracle_flags.out);
      const auto& o = *report.oracle;
      if (!o.feasible) {
        std::printf("infeasible: user %d cannot reach its threshold\n", *o.blocking_user);
        return kExitValidation;
      }
      std::printf("optimum %.6f (%ld schedules checked)\n", o.total, o.schedules_checked);
      for (const auto& row : o.evaluation.rows) {
        if (row.pool)
          std::printf("  user %d: t=%d lot=%d type=%d n=%d cost=%.6f\n", row.user, row.start,
                      cfg.net.pool_lot(*row.pool), evsched::pool_type(*row.pool), row.duration,
                      row.total);
        else
          std::printf("  user %d: not charged, cost=%.6f\n", row.user, row.total);
      }
      return report_audits(report);
    }
    if (*sweep) {
      const auto cfg = load(sweep_flags);
      const auto rows = evsched::sensitivity_sweep(cfg, param, values, {sweep_flags.workers});
      evsched::write_sweep(rows, std::filesystem::path(sweep_flags.out) / "sweep.csv");
      for (const auto& r : rows)
        std::printf("%s=%-8s total %.2f  travel %.2f  charging+penalty %.2f\n", param.c_str(),
                    r.value.c_str(), r.total, r.travel, r.charging_penalty);
      return 0;
    }
  } catch (const evsched::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const evsched::LookupError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const evsched::ContractViolation& e) {
    std::cerr << "audit: " << e.what() << '\n';
    return kExitAudit;
  }
  return 0;
}
