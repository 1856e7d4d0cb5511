#include "avmarket/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "avmarket/config_io.hpp"
#include "avmarket/csv.hpp"
#include "avmarket/equilibrium.hpp"
#include "avmarket/errors.hpp"
#include "avmarket/objectives.hpp"

namespace avmarket {

namespace {

// All AV-mode trips minus the crowdsourced ones = privately driven AV trips.
double private_av_trips(const EquilibriumState& s) { return s.demand_qa - s.demand_qo; }

void state_columns(CsvWriter& csv, const PeriodSpec& period, const PricePoint& price,
                   const SolveResult& solve) {
  const EquilibriumState& s = solve.state;
  csv.add(period.duration_Hk);
  csv.add(period.decision_window_h);
  csv.add(price.fare_Fo);
  csv.add(price.payment_p);
  csv.add(s.trip_time_tr);
  csv.add(s.pickup_time_tp);
  csv.add(s.customer_wait_wc);
  csv.add(s.vehicle_idle_wt);
  csv.add(s.rides_per_vehicle_n0);
  csv.add(s.fleet_N);
  csv.add(s.rented_Nr);
  csv.add(s.demand_qo);
  csv.add(private_av_trips(s));
  csv.add(s.demand_qm);
  csv.add(s.demand_qp);
  csv.add(solve.iterations);
  csv.add(solve.residual);
}

CsvWriter equilibrium_csv(const ExperimentConfig& config, const PricingDecision& prices,
                          const std::vector<SolveResult>& solves) {
  CsvWriter csv({"period", "duration_h", "window_h", "fare", "payment", "trip_time_h",
                 "pickup_time_h", "customer_wait_h", "vehicle_idle_h", "rides_per_vehicle",
                 "fleet", "rented", "trips_ondemand", "trips_private_av", "trips_manual",
                 "trips_transit", "iterations", "residual"});
  const auto periods = config.periods();
  for (std::size_t k = 0; k < periods.size(); ++k) {
    csv.begin_row();
    csv.add(static_cast<int>(k));
    state_columns(csv, periods[k], prices[k], solves[k]);
    csv.end_row();
  }
  return csv;
}

std::string sanitize(std::string text) {
  for (char& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return text;
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("AVM_OUTPUT_DIR"); env && *env) return env;
  return config.output_dir;
}

std::string write_solve_csv(const ExperimentConfig& config, const PricingDecision& prices,
                            const std::vector<SolveResult>& solves) {
  if (prices.size() != solves.size() || prices.size() != config.periods().size())
    throw ContractViolation("periods, prices, and solves must align");
  return equilibrium_csv(config, prices, solves).text();
}

RunArtifacts run(const ExperimentConfig& config, const ScenarioSpec& scenario) {
  RunArtifacts art;
  art.result = optimize(scenario, config);
  const ScenarioResult& r = art.result;

  namespace fs = std::filesystem;
  const fs::path dir = resolve_output_dir(config);
  const std::string stem = scenario_name(scenario.kind);

  CsvWriter eq = equilibrium_csv(config, r.prices, r.solves);
  const std::string eq_path = (dir / (stem + "_equilibrium.csv")).string();
  eq.write_file(eq_path);
  art.files_written.push_back(eq_path);

  CsvWriter summary({"scenario", "rho", "daily_profit", "daily_welfare", "operating_profit",
                     "lambda", "floor", "constraint_slack", "optimal"});
  summary.begin_row();
  summary.add(std::string(scenario_name(scenario.kind)));
  summary.add(scenario.rho);
  summary.add(r.daily_profit);
  summary.add(r.daily_welfare);
  summary.add(r.operating_profit);
  summary.add(r.lambda);
  summary.add(r.floor);
  summary.add(r.constraint_slack);
  summary.add(r.optimal ? 1 : 0);
  summary.end_row();
  const std::string sum_path = (dir / (stem + "_summary.csv")).string();
  summary.write_file(sum_path);
  art.files_written.push_back(sum_path);

  CsvWriter trace({"period", "start", "iteration", "fare", "payment", "objective",
                   "projected_gradient_norm", "step"});
  for (const TraceRow& t : r.trace) {
    trace.begin_row();
    trace.add(t.period);
    trace.add(t.start_index);
    trace.add(t.iteration);
    trace.add(t.fare);
    trace.add(t.payment);
    trace.add(t.objective);
    trace.add(t.projected_gradient_norm);
    trace.add(t.step);
    trace.end_row();
  }
  const std::string trace_path = (dir / (stem + "_trace.csv")).string();
  trace.write_file(trace_path);
  art.files_written.push_back(trace_path);
  return art;
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& config, SweepParameter parameter,
                                   double value) {
  ExperimentConfig out = config;
  switch (parameter) {
    case SweepParameter::mu:
      out.choice_model.mu = value;
      out.choice_model.mu_r = value;
      out.choice_model.mu_t = value;
      break;
    case SweepParameter::population_density:
      if (out.explicit_periods)
        throw ConfigError("config: population_density sweep needs derived periods, "
                          "but explicit periods are set");
      out.population.density_per_km2 = value;
      break;
    case SweepParameter::av_penetration:
      if (out.explicit_periods)
        throw ConfigError("config: av_penetration sweep needs derived periods, "
                          "but explicit periods are set");
      out.population.av_penetration = value;
      break;
    case SweepParameter::alpha:
      out.city.av_occupation_alpha = value;
      break;
    case SweepParameter::N_s:
      out.econ.prepurchased_Ns = value;
      break;
    case SweepParameter::m:
      out.econ.sharing_cost_m = value;
      break;
  }
  validate_config(out);
  return out;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("config: sweep.values must be non-empty");
  if (spec.scenarios.empty()) throw ConfigError("config: sweep.scenarios must be non-empty");
  const std::size_t n_scen = spec.scenarios.size();
  std::vector<SweepRow> rows(spec.values.size() * n_scen);
  for (std::size_t vi = 0; vi < spec.values.size(); ++vi)
    for (std::size_t si = 0; si < n_scen; ++si) {
      rows[vi * n_scen + si].value = spec.values[vi];
      rows[vi * n_scen + si].scenario = spec.scenarios[si];
    }

  auto work = [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    try {
      const ExperimentConfig point = apply_sweep_value(config, spec.parameter, row.value);
      row.result = optimize(row.scenario, point);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };

  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1 || rows.size() <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) work(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int width = std::min<std::size_t>(jobs, rows.size());
  pool.reserve(width);
  for (int t = 0; t < width; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) work(i);
    });
  for (auto& th : pool) th.join();
  return rows;
}

std::string write_sweep_csv(const ExperimentConfig& config, const SweepSpec& spec,
                            const std::vector<SweepRow>& rows) {
  const std::size_t n_periods = config.periods().size();
  std::vector<std::string> header = {"parameter", "value",          "scenario",
                                     "ok",        "error",          "daily_profit",
                                     "daily_welfare", "operating_profit", "lambda"};
  for (std::size_t k = 0; k < n_periods; ++k) {
    const std::string s = std::to_string(k);
    for (const char* col : {"fare_", "payment_", "trips_ondemand_", "trips_private_av_",
                            "trips_manual_", "trips_transit_"})
      header.push_back(col + s);
  }
  CsvWriter csv(header);
  for (const SweepRow& row : rows) {
    csv.begin_row();
    csv.add(std::string(sweep_parameter_name(spec.parameter)));
    csv.add(row.value);
    csv.add(std::string(scenario_name(row.scenario.kind)));
    csv.add(row.ok ? 1 : 0);
    csv.add(sanitize(row.error));
    if (row.ok) {
      csv.add(row.result.daily_profit);
      csv.add(row.result.daily_welfare);
      csv.add(row.result.operating_profit);
      csv.add(row.result.lambda);
      for (std::size_t k = 0; k < n_periods; ++k) {
        const EquilibriumState& s = row.result.states[k];
        csv.add(row.result.prices[k].fare_Fo);
        csv.add(row.result.prices[k].payment_p);
        csv.add(s.demand_qo);
        csv.add(private_av_trips(s));
        csv.add(s.demand_qm);
        csv.add(s.demand_qp);
      }
    } else {
      for (std::size_t i = 0; i < 4 + 6 * n_periods; ++i) csv.add(std::string());
    }
    csv.end_row();
  }
  const std::string path =
      (std::filesystem::path(resolve_output_dir(config)) /
       (std::string("sweep_") + sweep_parameter_name(spec.parameter) + ".csv"))
          .string();
  csv.write_file(path);
  return path;
}

}  // namespace avmarket
