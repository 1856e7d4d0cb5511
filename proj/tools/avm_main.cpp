#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avmarket/config_io.hpp"
#include "avmarket/equilibrium.hpp"
#include "avmarket/errors.hpp"
#include "avmarket/objectives.hpp"
#include "avmarket/runner.hpp"
#include "avmarket/sensitivity.hpp"

namespace {

using namespace avmarket;

constexpr int kExitUsage = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitInfeasible = 4;

ExperimentConfig load_or_default(const std::string& path) {
  if (path.empty()) return default_config();
  return load_config_file(path);
}

ScenarioKind scenario_from_name(const std::string& name) {
  for (ScenarioKind k :
       {ScenarioKind::monopoly, ScenarioKind::first_best, ScenarioKind::second_best})
    if (name == scenario_name(k)) return k;
  throw ConfigError("unknown scenario \"" + name + "\"");
}

// Broadcasts a single value across periods; otherwise sizes must match.
std::vector<double> per_period(std::vector<double> values, std::size_t n_periods,
                               const char* flag) {
  if (values.size() == 1) return std::vector<double>(n_periods, values[0]);
  if (values.size() != n_periods)
    throw ConfigError(std::string(flag) + " given " + std::to_string(values.size()) +
                      " times for " + std::to_string(n_periods) + " periods");
  return values;
}

int cmd_solve(const std::string& config_path, std::vector<double> fares,
              std::vector<double> payments) {
  const ExperimentConfig config = load_or_default(config_path);
  const auto periods = config.periods();
  fares = per_period(std::move(fares), periods.size(), "--fare");
  payments = per_period(std::move(payments), periods.size(), "--payment");
  PricingDecision prices;
  std::vector<SolveResult> solves;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    prices.push_back({fares[k], payments[k]});
    solves.push_back(solve_equilibrium(prices.back(), config, periods[k]));
  }
  std::fputs(write_solve_csv(config, prices, solves).c_str(), stdout);
  return 0;
}

int cmd_optimize(const std::string& config_path, const std::string& scenario,
                 std::optional<double> rho) {
  const ExperimentConfig config = load_or_default(config_path);
  ScenarioSpec spec;
  spec.kind = scenario_from_name(scenario);
  spec.rho = rho.value_or(config.econ.profit_floor_rate_rho);
  const RunArtifacts art = run(config, spec);
  const ScenarioResult& r = art.result;
  std::printf("scenario: %s\n", scenario_name(spec.kind));
  std::printf("daily profit: %.6g\n", r.daily_profit);
  std::printf("daily welfare: %.6g\n", r.daily_welfare);
  std::printf("operating profit: %.6g\n", r.operating_profit);
  if (spec.kind == ScenarioKind::second_best) {
    std::printf("lambda: %.6g\n", r.lambda);
    std::printf("profit floor: %.6g (slack %.6g)\n", r.floor, r.constraint_slack);
  }
  for (std::size_t k = 0; k < r.prices.size(); ++k)
    std::printf("period %zu: fare %.6g payment %.6g\n", k, r.prices[k].fare_Fo,
                r.prices[k].payment_p);
  for (const std::string& f : art.files_written) std::printf("wrote %s\n", f.c_str());
  if (!r.optimal) {
    std::fputs("warning: optimizer stopped before the gradient tolerance\n", stderr);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              std::vector<double> values, std::vector<std::string> scenario_names, int jobs) {
  const ExperimentConfig config = load_or_default(config_path);
  SweepSpec spec;
  if (config.sweep) spec = *config.sweep;
  if (!param.empty()) {
    const auto p = parse_sweep_parameter(param);
    if (!p) throw ConfigError("unknown sweep parameter \"" + param + "\"");
    spec.parameter = *p;
  } else if (!config.sweep) {
    throw ConfigError("no sweep parameter: pass --param or set sweep in the config");
  }
  if (!values.empty()) spec.values = std::move(values);
  if (spec.values.empty()) throw ConfigError("no sweep values: pass --value or set sweep.values");
  if (!scenario_names.empty()) {
    spec.scenarios.clear();
    for (const auto& name : scenario_names)
      spec.scenarios.push_back({scenario_from_name(name), config.econ.profit_floor_rate_rho});
  }
  if (spec.scenarios.empty())
    spec.scenarios.push_back({ScenarioKind::monopoly, config.econ.profit_floor_rate_rho});
  if (jobs > 0) spec.jobs = jobs;

  const auto rows = sweep(config, spec);
  const std::string path = write_sweep_csv(config, spec, rows);
  std::size_t failed = 0;
  for (const auto& row : rows)
    if (!row.ok) ++failed;
  std::printf("wrote %s (%zu rows, %zu failed)\n", path.c_str(), rows.size(), failed);
  return 0;
}

int cmd_check_gradients(const std::string& config_path) {
  const ExperimentConfig config = load_or_default(config_path);
  const auto periods = config.periods();
  const PricePoint points[] = {{10.0, 5.0}, {25.0, 12.0}, {40.0, 20.0}};
  const struct {
    ScenarioKind kind;
    double lambda;
  } cases[] = {{ScenarioKind::monopoly, 0.0},
               {ScenarioKind::first_best, 0.0},
               {ScenarioKind::second_best, 0.5}};
  constexpr double kTol = 1e-3;
  constexpr double kFdStep = 1e-4;
  bool ok = true;
  std::printf("%-12s %-6s %-14s %-14s %-10s\n", "scenario", "period", "analytic", "numeric",
              "rel_err");
  for (const auto& c : cases) {
    for (std::size_t k = 0; k < periods.size(); ++k) {
      for (const PricePoint& pt : points) {
        const SolveResult sr = solve_equilibrium(pt, config, periods[k]);
        const PeriodGradient g =
            objective_gradient(c.kind, c.lambda, sr.state, pt, config, periods[k]);
        auto value_at = [&](PricePoint q) {
          ExperimentConfig tight = config;
          tight.solver.residual_tolerance = std::min(config.solver.residual_tolerance, 1e-11);
          const SolveResult s = solve_equilibrium(q, tight, periods[k]);
          const double profit = operating_profit(s.state, q, periods[k].decision_window_h);
          if (c.kind == ScenarioKind::monopoly) return profit;
          const double welfare = period_welfare(s.state, q, tight, periods[k]);
          return c.kind == ScenarioKind::first_best ? welfare : welfare + c.lambda * profit;
        };
        const double fd_f = (value_at({pt.fare_Fo + kFdStep, pt.payment_p}) -
                             value_at({pt.fare_Fo - kFdStep, pt.payment_p})) /
                            (2 * kFdStep);
        const double fd_p = (value_at({pt.fare_Fo, pt.payment_p + kFdStep}) -
                             value_at({pt.fare_Fo, pt.payment_p - kFdStep})) /
                            (2 * kFdStep);
        const double scale =
            std::max({std::abs(fd_f), std::abs(fd_p), std::abs(g.d_fare), std::abs(g.d_payment),
                      1.0});
        const double err =
            std::max(std::abs(g.d_fare - fd_f), std::abs(g.d_payment - fd_p)) / scale;
        std::printf("%-12s %-6zu (%.4g, %.4g) (%.4g, %.4g) %.3e\n", scenario_name(c.kind), k,
                    g.d_fare, g.d_payment, fd_f, fd_p, err);
        ok = ok && err <= kTol;
      }
    }
  }
  std::printf("gradients %s\n", ok ? "match" : "MISMATCH");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AV crowdsourcing market equilibrium and pricing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "1.0.0");

  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON config file (defaults used when absent)");

  auto* solve = app.add_subcommand("solve", "Solve the equilibrium at fixed prices");
  std::vector<double> fares, payments;
  solve->add_option("--fare", fares, "Fare per trip; repeat per period or give once")
      ->required();
  solve->add_option("--payment", payments, "Payment per ride; repeat per period or give once")
      ->required();

  auto* optimize = app.add_subcommand("optimize", "Optimize fares and payments");
  std::string scenario = "monopoly";
  optimize->add_option("--scenario", scenario, "monopoly | first-best | second-best")
      ->required();
  std::optional<double> rho;
  optimize->add_option("--rho", rho, "Profit-floor rate (second-best)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Re-optimize across a parameter grid");
  std::string param;
  std::vector<double> values;
  std::vector<std::string> sweep_scenarios;
  int jobs = 0;
  sweep_cmd->add_option("--param", param,
                        "mu | population_density | av_penetration | alpha | N_s | m");
  sweep_cmd->add_option("--value", values, "Grid values (repeatable)");
  sweep_cmd->add_option("--scenario", sweep_scenarios, "Scenarios to run (repeatable)");
  sweep_cmd->add_option("--jobs", jobs, "Parallel grid points");

  auto* check = app.add_subcommand("check-gradients", "Compare analytic and numeric gradients");
  auto* defaults = app.add_subcommand("default-config", "Print the built-in config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path, fares, payments);
    if (optimize->parsed()) return cmd_optimize(config_path, scenario, rho);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, param, values, sweep_scenarios, jobs);
    if (check->parsed()) return cmd_check_gradients(config_path);
    if (defaults->parsed()) {
      std::fputs(serialize_config(default_config()).c_str(), stdout);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const NonConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNoConverge;
  } catch (const InfeasibleFloorError& e) {
    std::fprintf(stderr, "error: %s (best %.6g, floor %.6g)\n", e.what(), e.attainable_profit,
                 e.floor);
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
