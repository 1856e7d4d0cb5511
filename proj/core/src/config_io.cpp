#include "avmarket/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "avmarket/errors.hpp"

namespace avmarket {

using ordered_json = nlohmann::ordered_json;

std::vector<PeriodSpec> ExperimentConfig::periods() const {
  if (explicit_periods) return *explicit_periods;
  const PopulationModel& pm = population;
  const double total = total_population();
  const double owners = pm.vehicle_owner_share * total;
  const double av_owners = pm.av_penetration * owners;
  const double mv_only = owners - av_owners;
  const double no_vehicle = total - owners;
  std::vector<PeriodSpec> out;
  const double hours[2] = {pm.peak_hours, pm.offpeak_hours};
  const double shares[2] = {pm.peak_travel_share, pm.offpeak_travel_share};
  for (int i = 0; i < 2; ++i) {
    if (hours[i] <= 0.0) continue;
    PeriodSpec p;
    p.duration_Hk = hours[i];
    p.decision_window_h = pm.decision_window_h;
    const double travelers = shares[i] * total;
    // Travel need falls on each ownership group in proportion to its size.
    p.populations[static_cast<int>(ClassLabel::n)] = travelers * no_vehicle / total;
    p.populations[static_cast<int>(ClassLabel::r)] = travelers * mv_only / total;
    const double a = travelers * av_owners / total;
    p.populations[static_cast<int>(ClassLabel::a)] = a;
    p.populations[static_cast<int>(ClassLabel::ap)] = av_owners - a;
    out.push_back(p);
  }
  return out;
}

bool operator==(const CityParams& a, const CityParams& b) {
  return a.area_R == b.area_R && a.free_flow_speed_v0 == b.free_flow_speed_v0 &&
         a.grid_constant_k == b.grid_constant_k && a.trip_factor_kappa == b.trip_factor_kappa &&
         a.congestion_base_a == b.congestion_base_a && a.congestion_coeff_b == b.congestion_coeff_b &&
         a.av_occupation_alpha == b.av_occupation_alpha && a.matching_A == b.matching_A &&
         a.matching_alpha1 == b.matching_alpha1 && a.matching_alpha2 == b.matching_alpha2 &&
         a.xi1_epsilon == b.xi1_epsilon && a.xi2_epsilon == b.xi2_epsilon;
}

bool operator==(const EconomicParams& a, const EconomicParams& b) {
  return a.beta_A == b.beta_A && a.beta_P == b.beta_P && a.beta_M == b.beta_M &&
         a.gamma == b.gamma && a.transit_time_tn == b.transit_time_tn &&
         a.transit_fare_Fn == b.transit_fare_Fn && a.sharing_cost_m == b.sharing_cost_m &&
         a.purchase_amortized_g == b.purchase_amortized_g &&
         a.maintenance_amortized_z == b.maintenance_amortized_z &&
         a.fixed_cost_Cf == b.fixed_cost_Cf && a.prepurchased_Ns == b.prepurchased_Ns &&
         a.profit_floor_rate_rho == b.profit_floor_rate_rho;
}

bool operator==(const ChoiceModel& a, const ChoiceModel& b) {
  return a.mu == b.mu && a.nested == b.nested && a.mu_r == b.mu_r && a.mu_t == b.mu_t;
}

bool operator==(const PeriodSpec& a, const PeriodSpec& b) {
  return a.duration_Hk == b.duration_Hk && a.decision_window_h == b.decision_window_h &&
         a.populations == b.populations;
}

bool operator==(const PopulationModel& a, const PopulationModel& b) {
  return a.density_per_km2 == b.density_per_km2 &&
         a.vehicle_owner_share == b.vehicle_owner_share && a.av_penetration == b.av_penetration &&
         a.peak_travel_share == b.peak_travel_share &&
         a.offpeak_travel_share == b.offpeak_travel_share && a.peak_hours == b.peak_hours &&
         a.offpeak_hours == b.offpeak_hours && a.decision_window_h == b.decision_window_h;
}

bool operator==(const SolverSettings& a, const SolverSettings& b) {
  return a.lambda_fp == b.lambda_fp && a.max_iterations == b.max_iterations &&
         a.residual_tolerance == b.residual_tolerance && a.demand_floor == b.demand_floor;
}

bool operator==(const OptimizerSettings& a, const OptimizerSettings& b) {
  return a.max_iterations == b.max_iterations && a.gradient_tolerance == b.gradient_tolerance &&
         a.armijo_c == b.armijo_c && a.backtrack_factor == b.backtrack_factor &&
         a.initial_step == b.initial_step && a.multistart == b.multistart;
}

bool operator==(const LambdaLoopSettings& a, const LambdaLoopSettings& b) {
  return a.lambda_max == b.lambda_max && a.profit_match_rtol == b.profit_match_rtol &&
         a.max_bisections == b.max_bisections;
}

bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
  return a.kind == b.kind && a.rho == b.rho;
}

bool operator==(const SweepSpec& a, const SweepSpec& b) {
  return a.parameter == b.parameter && a.values == b.values && a.scenarios == b.scenarios &&
         a.jobs == b.jobs;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.city == b.city && a.econ == b.econ && a.choice_model == b.choice_model &&
         a.population == b.population && a.explicit_periods == b.explicit_periods &&
         a.solver == b.solver && a.optimizer == b.optimizer && a.lambda_loop == b.lambda_loop &&
         a.scenarios == b.scenarios && a.sweep == b.sweep && a.output_dir == b.output_dir;
}

const char* sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::mu: return "mu";
    case SweepParameter::population_density: return "population_density";
    case SweepParameter::av_penetration: return "av_penetration";
    case SweepParameter::alpha: return "alpha";
    case SweepParameter::N_s: return "N_s";
    case SweepParameter::m: return "m";
  }
  return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(const std::string& name) {
  for (SweepParameter p : {SweepParameter::mu, SweepParameter::population_density,
                           SweepParameter::av_penetration, SweepParameter::alpha,
                           SweepParameter::N_s, SweepParameter::m})
    if (name == sweep_parameter_name(p)) return p;
  return std::nullopt;
}

namespace {

std::optional<ScenarioKind> parse_scenario_kind(const std::string& name) {
  for (ScenarioKind k :
       {ScenarioKind::monopoly, ScenarioKind::first_best, ScenarioKind::second_best})
    if (name == scenario_name(k)) return k;
  return std::nullopt;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + " " + what);
}

const ordered_json& expect_object(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  return j;
}

void check_keys(const ordered_json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) { known = true; break; }
    if (!known) fail(path.empty() ? item.key() : path + "." + item.key(), "is not a recognized key");
  }
}

void get_num(const ordered_json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  out = v.get<double>();
}

void get_int(const ordered_json& obj, const std::string& path, const char* key, int& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
  out = v.get<int>();
}

void get_bool(const ordered_json& obj, const std::string& path, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "must be a boolean");
  out = v.get<bool>();
}

void get_str(const ordered_json& obj, const std::string& path, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "must be a string");
  out = v.get<std::string>();
}

constexpr const char* kClassKeys[kNumClasses] = {"n", "r", "a", "a_prime", "b", "b_prime"};

void parse_city(const ordered_json& j, CityParams& c) {
  const std::string path = "city";
  expect_object(j, path);
  check_keys(j, path,
             {"area_km2", "free_flow_speed_kmh", "grid_constant_k", "trip_factor_kappa",
              "congestion_base_h", "congestion_coeff", "av_occupation_alpha", "matching_A",
              "matching_alpha1", "matching_alpha2", "xi1_epsilon", "xi2_epsilon"});
  get_num(j, path, "area_km2", c.area_R);
  get_num(j, path, "free_flow_speed_kmh", c.free_flow_speed_v0);
  get_num(j, path, "grid_constant_k", c.grid_constant_k);
  get_num(j, path, "trip_factor_kappa", c.trip_factor_kappa);
  get_num(j, path, "congestion_base_h", c.congestion_base_a);
  get_num(j, path, "congestion_coeff", c.congestion_coeff_b);
  get_num(j, path, "av_occupation_alpha", c.av_occupation_alpha);
  get_num(j, path, "matching_A", c.matching_A);
  get_num(j, path, "matching_alpha1", c.matching_alpha1);
  get_num(j, path, "matching_alpha2", c.matching_alpha2);
  get_num(j, path, "xi1_epsilon", c.xi1_epsilon);
  get_num(j, path, "xi2_epsilon", c.xi2_epsilon);
}

void parse_econ(const ordered_json& j, EconomicParams& e) {
  const std::string path = "economics";
  expect_object(j, path);
  check_keys(j, path,
             {"beta_av", "beta_transit", "beta_manual", "gamma_wait", "transit_time_h",
              "transit_fare", "sharing_cost_m", "purchase_amortized_g", "maintenance_amortized_z",
              "fixed_cost_Cf", "prepurchased_Ns", "profit_floor_rho"});
  get_num(j, path, "beta_av", e.beta_A);
  get_num(j, path, "beta_transit", e.beta_P);
  get_num(j, path, "beta_manual", e.beta_M);
  get_num(j, path, "gamma_wait", e.gamma);
  get_num(j, path, "transit_time_h", e.transit_time_tn);
  get_num(j, path, "transit_fare", e.transit_fare_Fn);
  get_num(j, path, "sharing_cost_m", e.sharing_cost_m);
  get_num(j, path, "purchase_amortized_g", e.purchase_amortized_g);
  get_num(j, path, "maintenance_amortized_z", e.maintenance_amortized_z);
  get_num(j, path, "fixed_cost_Cf", e.fixed_cost_Cf);
  get_num(j, path, "prepurchased_Ns", e.prepurchased_Ns);
  get_num(j, path, "profit_floor_rho", e.profit_floor_rate_rho);
}

void parse_choice(const ordered_json& j, ChoiceModel& c) {
  const std::string path = "choice";
  expect_object(j, path);
  check_keys(j, path, {"mu", "nested", "mu_rental", "mu_travel"});
  get_num(j, path, "mu", c.mu);
  get_bool(j, path, "nested", c.nested);
  // Level scales track the flat scale unless set explicitly.
  c.mu_r = c.mu_t = c.mu;
  get_num(j, path, "mu_rental", c.mu_r);
  get_num(j, path, "mu_travel", c.mu_t);
}

void parse_population(const ordered_json& j, PopulationModel& p) {
  const std::string path = "population";
  expect_object(j, path);
  check_keys(j, path,
             {"density_per_km2", "vehicle_owner_share", "av_penetration", "peak_travel_share",
              "offpeak_travel_share", "peak_hours", "offpeak_hours", "decision_window_h"});
  get_num(j, path, "density_per_km2", p.density_per_km2);
  get_num(j, path, "vehicle_owner_share", p.vehicle_owner_share);
  get_num(j, path, "av_penetration", p.av_penetration);
  get_num(j, path, "peak_travel_share", p.peak_travel_share);
  get_num(j, path, "offpeak_travel_share", p.offpeak_travel_share);
  get_num(j, path, "peak_hours", p.peak_hours);
  get_num(j, path, "offpeak_hours", p.offpeak_hours);
  get_num(j, path, "decision_window_h", p.decision_window_h);
}

std::vector<PeriodSpec> parse_periods(const ordered_json& j) {
  if (!j.is_array()) fail("periods", "must be an array");
  std::vector<PeriodSpec> out;
  int idx = 0;
  for (const auto& pj : j) {
    const std::string path = "periods[" + std::to_string(idx++) + "]";
    expect_object(pj, path);
    check_keys(pj, path, {"duration_h", "decision_window_h", "populations"});
    PeriodSpec p;
    get_num(pj, path, "duration_h", p.duration_Hk);
    get_num(pj, path, "decision_window_h", p.decision_window_h);
    if (pj.contains("populations")) {
      const auto& pops = pj.at("populations");
      expect_object(pops, path + ".populations");
      check_keys(pops, path + ".populations",
                 {kClassKeys[0], kClassKeys[1], kClassKeys[2], kClassKeys[3], kClassKeys[4],
                  kClassKeys[5]});
      for (int c = 0; c < kNumClasses; ++c)
        get_num(pops, path + ".populations", kClassKeys[c], p.populations[c]);
    }
    out.push_back(p);
  }
  return out;
}

void parse_solver(const ordered_json& j, SolverSettings& s) {
  const std::string path = "solver";
  expect_object(j, path);
  check_keys(j, path, {"damping", "max_iterations", "residual_tolerance", "demand_floor"});
  get_num(j, path, "damping", s.lambda_fp);
  get_int(j, path, "max_iterations", s.max_iterations);
  get_num(j, path, "residual_tolerance", s.residual_tolerance);
  get_num(j, path, "demand_floor", s.demand_floor);
}

void parse_optimizer(const ordered_json& j, OptimizerSettings& o) {
  const std::string path = "optimizer";
  expect_object(j, path);
  check_keys(j, path,
             {"max_iterations", "gradient_tolerance", "armijo_c", "backtrack_factor",
              "initial_step", "multistart"});
  get_int(j, path, "max_iterations", o.max_iterations);
  get_num(j, path, "gradient_tolerance", o.gradient_tolerance);
  get_num(j, path, "armijo_c", o.armijo_c);
  get_num(j, path, "backtrack_factor", o.backtrack_factor);
  get_num(j, path, "initial_step", o.initial_step);
  get_int(j, path, "multistart", o.multistart);
}

void parse_lambda_loop(const ordered_json& j, LambdaLoopSettings& l) {
  const std::string path = "lambda_loop";
  expect_object(j, path);
  check_keys(j, path, {"lambda_max", "profit_match_rtol", "max_bisections"});
  get_num(j, path, "lambda_max", l.lambda_max);
  get_num(j, path, "profit_match_rtol", l.profit_match_rtol);
  get_int(j, path, "max_bisections", l.max_bisections);
}

std::vector<ScenarioKind> parse_scenarios(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of scenario names");
  std::vector<ScenarioKind> out;
  for (const auto& sj : j) {
    if (!sj.is_string()) fail(path, "must contain only scenario names");
    const auto k = parse_scenario_kind(sj.get<std::string>());
    if (!k) fail(path, "has unknown scenario \"" + sj.get<std::string>() + "\"");
    out.push_back(*k);
  }
  return out;
}

SweepSpec parse_sweep(const ordered_json& j, const EconomicParams& econ) {
  const std::string path = "sweep";
  expect_object(j, path);
  check_keys(j, path, {"parameter", "values", "scenarios", "jobs"});
  SweepSpec s;
  std::string pname = sweep_parameter_name(s.parameter);
  get_str(j, path, "parameter", pname);
  const auto p = parse_sweep_parameter(pname);
  if (!p) fail(path + ".parameter", "has unknown value \"" + pname + "\"");
  s.parameter = *p;
  if (j.contains("values")) {
    const auto& vj = j.at("values");
    if (!vj.is_array()) fail(path + ".values", "must be an array of numbers");
    for (const auto& v : vj) {
      if (!v.is_number()) fail(path + ".values", "must be an array of numbers");
      s.values.push_back(v.get<double>());
    }
  }
  if (j.contains("scenarios"))
    for (ScenarioKind k : parse_scenarios(j.at("scenarios"), path + ".scenarios"))
      s.scenarios.push_back({k, econ.profit_floor_rate_rho});
  get_int(j, path, "jobs", s.jobs);
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

ExperimentConfig default_config() { return {}; }

ExperimentConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  expect_object(j, "(root)");
  check_keys(j, "",
             {"city", "economics", "choice", "population", "periods", "solver", "optimizer",
              "lambda_loop", "scenarios", "sweep", "output_dir"});
  ExperimentConfig cfg;
  if (j.contains("city")) parse_city(j.at("city"), cfg.city);
  if (j.contains("economics")) parse_econ(j.at("economics"), cfg.econ);
  if (j.contains("choice")) parse_choice(j.at("choice"), cfg.choice_model);
  if (j.contains("population")) parse_population(j.at("population"), cfg.population);
  if (j.contains("periods")) cfg.explicit_periods = parse_periods(j.at("periods"));
  if (j.contains("solver")) parse_solver(j.at("solver"), cfg.solver);
  if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), cfg.optimizer);
  if (j.contains("lambda_loop")) parse_lambda_loop(j.at("lambda_loop"), cfg.lambda_loop);
  if (j.contains("scenarios")) cfg.scenarios = parse_scenarios(j.at("scenarios"), "scenarios");
  if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"), cfg.econ);
  get_str(j, "(root)", "output_dir", cfg.output_dir);
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  ordered_json j;
  j["city"] = {{"area_km2", c.city.area_R},
               {"free_flow_speed_kmh", c.city.free_flow_speed_v0},
               {"grid_constant_k", c.city.grid_constant_k},
               {"trip_factor_kappa", c.city.trip_factor_kappa},
               {"congestion_base_h", c.city.congestion_base_a},
               {"congestion_coeff", c.city.congestion_coeff_b},
               {"av_occupation_alpha", c.city.av_occupation_alpha},
               {"matching_A", c.city.matching_A},
               {"matching_alpha1", c.city.matching_alpha1},
               {"matching_alpha2", c.city.matching_alpha2},
               {"xi1_epsilon", c.city.xi1_epsilon},
               {"xi2_epsilon", c.city.xi2_epsilon}};
  j["economics"] = {{"beta_av", c.econ.beta_A},
                    {"beta_transit", c.econ.beta_P},
                    {"beta_manual", c.econ.beta_M},
                    {"gamma_wait", c.econ.gamma},
                    {"transit_time_h", c.econ.transit_time_tn},
                    {"transit_fare", c.econ.transit_fare_Fn},
                    {"sharing_cost_m", c.econ.sharing_cost_m},
                    {"purchase_amortized_g", c.econ.purchase_amortized_g},
                    {"maintenance_amortized_z", c.econ.maintenance_amortized_z},
                    {"fixed_cost_Cf", c.econ.fixed_cost_Cf},
                    {"prepurchased_Ns", c.econ.prepurchased_Ns},
                    {"profit_floor_rho", c.econ.profit_floor_rate_rho}};
  j["choice"] = {{"mu", c.choice_model.mu},
                 {"nested", c.choice_model.nested},
                 {"mu_rental", c.choice_model.mu_r},
                 {"mu_travel", c.choice_model.mu_t}};
  j["population"] = {{"density_per_km2", c.population.density_per_km2},
                     {"vehicle_owner_share", c.population.vehicle_owner_share},
                     {"av_penetration", c.population.av_penetration},
                     {"peak_travel_share", c.population.peak_travel_share},
                     {"offpeak_travel_share", c.population.offpeak_travel_share},
                     {"peak_hours", c.population.peak_hours},
                     {"offpeak_hours", c.population.offpeak_hours},
                     {"decision_window_h", c.population.decision_window_h}};
  if (c.explicit_periods) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : *c.explicit_periods) {
      ordered_json pops;
      for (int x = 0; x < kNumClasses; ++x) pops[kClassKeys[x]] = p.populations[x];
      arr.push_back({{"duration_h", p.duration_Hk},
                     {"decision_window_h", p.decision_window_h},
                     {"populations", pops}});
    }
    j["periods"] = arr;
  }
  j["solver"] = {{"damping", c.solver.lambda_fp},
                 {"max_iterations", c.solver.max_iterations},
                 {"residual_tolerance", c.solver.residual_tolerance},
                 {"demand_floor", c.solver.demand_floor}};
  j["optimizer"] = {{"max_iterations", c.optimizer.max_iterations},
                    {"gradient_tolerance", c.optimizer.gradient_tolerance},
                    {"armijo_c", c.optimizer.armijo_c},
                    {"backtrack_factor", c.optimizer.backtrack_factor},
                    {"initial_step", c.optimizer.initial_step},
                    {"multistart", c.optimizer.multistart}};
  j["lambda_loop"] = {{"lambda_max", c.lambda_loop.lambda_max},
                      {"profit_match_rtol", c.lambda_loop.profit_match_rtol},
                      {"max_bisections", c.lambda_loop.max_bisections}};
  ordered_json scen = ordered_json::array();
  for (ScenarioKind k : c.scenarios) scen.push_back(scenario_name(k));
  j["scenarios"] = scen;
  if (c.sweep) {
    ordered_json vals = ordered_json::array();
    for (double v : c.sweep->values) vals.push_back(v);
    ordered_json sscen = ordered_json::array();
    for (const auto& s : c.sweep->scenarios) sscen.push_back(scenario_name(s.kind));
    j["sweep"] = {{"parameter", sweep_parameter_name(c.sweep->parameter)},
                  {"values", vals},
                  {"scenarios", sscen},
                  {"jobs", c.sweep->jobs}};
  }
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& cfg) {
  const auto& c = cfg.city;
  require(finite(c.area_R) && c.area_R > 0, "city.area_km2 must be positive");
  require(finite(c.free_flow_speed_v0) && c.free_flow_speed_v0 > 0,
          "city.free_flow_speed_kmh must be positive");
  require(finite(c.grid_constant_k) && c.grid_constant_k > 0,
          "city.grid_constant_k must be positive");
  require(finite(c.trip_factor_kappa) && c.trip_factor_kappa > 0,
          "city.trip_factor_kappa must be positive");
  require(finite(c.congestion_base_a) && c.congestion_base_a >= 0,
          "city.congestion_base_h must be nonnegative");
  require(finite(c.congestion_coeff_b) && c.congestion_coeff_b >= 0,
          "city.congestion_coeff must be nonnegative");
  require(finite(c.av_occupation_alpha) && c.av_occupation_alpha > 0 &&
              c.av_occupation_alpha <= 1,
          "city.av_occupation_alpha must be in (0, 1]");
  require(finite(c.matching_A) && c.matching_A > 0, "city.matching_A must be positive");
  require(finite(c.matching_alpha1) && c.matching_alpha1 > 0,
          "city.matching_alpha1 must be positive");
  require(finite(c.matching_alpha2) && c.matching_alpha2 > 0,
          "city.matching_alpha2 must be positive");
  require(finite(c.xi1_epsilon) && c.xi1_epsilon > 0, "city.xi1_epsilon must be positive");
  require(finite(c.xi2_epsilon) && c.xi2_epsilon > 0, "city.xi2_epsilon must be positive");

  const auto& e = cfg.econ;
  require(finite(e.beta_A) && e.beta_A > 0, "economics.beta_av must be positive");
  require(finite(e.beta_P) && e.beta_P > 0, "economics.beta_transit must be positive");
  require(finite(e.beta_M) && e.beta_M > 0, "economics.beta_manual must be positive");
  require(e.beta_A < e.beta_P && e.beta_P < e.beta_M,
          "economics value-of-time order must be beta_av < beta_transit < beta_manual");
  require(finite(e.gamma) && e.gamma > 0, "economics.gamma_wait must be positive");
  require(finite(e.transit_time_tn) && e.transit_time_tn >= 0,
          "economics.transit_time_h must be nonnegative");
  require(finite(e.transit_fare_Fn) && e.transit_fare_Fn >= 0,
          "economics.transit_fare must be nonnegative");
  require(finite(e.sharing_cost_m) && e.sharing_cost_m >= 0,
          "economics.sharing_cost_m must be nonnegative");
  require(finite(e.purchase_amortized_g) && e.purchase_amortized_g >= 0,
          "economics.purchase_amortized_g must be nonnegative");
  require(finite(e.maintenance_amortized_z) && e.maintenance_amortized_z >= 0,
          "economics.maintenance_amortized_z must be nonnegative");
  require(finite(e.fixed_cost_Cf) && e.fixed_cost_Cf >= 0,
          "economics.fixed_cost_Cf must be nonnegative");
  require(finite(e.prepurchased_Ns) && e.prepurchased_Ns >= 0,
          "economics.prepurchased_Ns must be nonnegative");
  require(finite(e.profit_floor_rate_rho) && e.profit_floor_rate_rho >= 0,
          "economics.profit_floor_rho must be nonnegative");

  const auto& m = cfg.choice_model;
  if (m.nested) {
    require(finite(m.mu_r) && m.mu_r > 0, "choice.mu_rental must be positive when nested");
    require(finite(m.mu_t) && m.mu_t > 0, "choice.mu_travel must be positive when nested");
  } else {
    require(finite(m.mu) && m.mu >= 0, "choice.mu must be nonnegative");
  }

  const auto& p = cfg.population;
  require(finite(p.density_per_km2) && p.density_per_km2 > 0,
          "population.density_per_km2 must be positive");
  require(finite(p.vehicle_owner_share) && p.vehicle_owner_share >= 0 &&
              p.vehicle_owner_share <= 1,
          "population.vehicle_owner_share must be in [0, 1]");
  require(finite(p.av_penetration) && p.av_penetration >= 0 && p.av_penetration <= 1,
          "population.av_penetration must be in [0, 1]");
  require(finite(p.peak_travel_share) && p.peak_travel_share >= 0 && p.peak_travel_share <= 1,
          "population.peak_travel_share must be in [0, 1]");
  require(finite(p.offpeak_travel_share) && p.offpeak_travel_share >= 0 &&
              p.offpeak_travel_share <= 1,
          "population.offpeak_travel_share must be in [0, 1]");
  require(finite(p.peak_hours) && p.peak_hours >= 0, "population.peak_hours must be nonnegative");
  require(finite(p.offpeak_hours) && p.offpeak_hours >= 0,
          "population.offpeak_hours must be nonnegative");
  require(finite(p.decision_window_h) && p.decision_window_h > 0,
          "population.decision_window_h must be positive");

  if (cfg.explicit_periods) {
    require(!cfg.explicit_periods->empty(), "periods must be non-empty when given");
    int idx = 0;
    double total_hours = 0;
    for (const auto& per : *cfg.explicit_periods) {
      const std::string tag = "periods[" + std::to_string(idx++) + "]";
      require(finite(per.duration_Hk) && per.duration_Hk > 0, tag + ".duration_h must be positive");
      require(finite(per.decision_window_h) && per.decision_window_h > 0,
              tag + ".decision_window_h must be positive");
      for (int x = 0; x < kNumClasses; ++x)
        require(finite(per.populations[x]) && per.populations[x] >= 0,
                tag + ".populations." + kClassKeys[x] + " must be nonnegative");
      total_hours += per.duration_Hk;
    }
    require(std::abs(total_hours - 24.0) <= 1e-9, "period durations must sum to 24 h");
  } else {
    require(std::abs(p.peak_hours + p.offpeak_hours - 24.0) <= 1e-9,
            "population peak_hours + offpeak_hours must sum to 24");
    require(p.peak_hours > 0 || p.offpeak_hours > 0, "at least one period must have hours");
  }

  const auto& s = cfg.solver;
  require(finite(s.lambda_fp) && s.lambda_fp > 0 && s.lambda_fp <= 1,
          "solver.damping must be in (0, 1]");
  require(s.max_iterations > 0, "solver.max_iterations must be positive");
  require(finite(s.residual_tolerance) && s.residual_tolerance > 0,
          "solver.residual_tolerance must be positive");
  require(finite(s.demand_floor) && s.demand_floor > 0, "solver.demand_floor must be positive");

  const auto& o = cfg.optimizer;
  require(o.max_iterations > 0, "optimizer.max_iterations must be positive");
  require(finite(o.gradient_tolerance) && o.gradient_tolerance > 0,
          "optimizer.gradient_tolerance must be positive");
  require(finite(o.armijo_c) && o.armijo_c > 0 && o.armijo_c < 1,
          "optimizer.armijo_c must be in (0, 1)");
  require(finite(o.backtrack_factor) && o.backtrack_factor > 0 && o.backtrack_factor < 1,
          "optimizer.backtrack_factor must be in (0, 1)");
  require(finite(o.initial_step) && o.initial_step > 0, "optimizer.initial_step must be positive");
  require(o.multistart >= 1, "optimizer.multistart must be at least 1");

  const auto& l = cfg.lambda_loop;
  require(finite(l.lambda_max) && l.lambda_max > 0, "lambda_loop.lambda_max must be positive");
  require(finite(l.profit_match_rtol) && l.profit_match_rtol > 0,
          "lambda_loop.profit_match_rtol must be positive");
  require(l.max_bisections >= 1, "lambda_loop.max_bisections must be at least 1");

  require(!cfg.scenarios.empty(), "scenarios must be non-empty");
  if (cfg.sweep) {
    require(!cfg.sweep->values.empty(), "sweep.values must be non-empty");
    require(std::is_sorted(cfg.sweep->values.begin(), cfg.sweep->values.end()),
            "sweep.values must be sorted ascending");
    require(!cfg.sweep->scenarios.empty(), "sweep.scenarios must be non-empty");
    require(cfg.sweep->jobs >= 1, "sweep.jobs must be at least 1");
  }
  require(!cfg.output_dir.empty(), "output_dir must be non-empty");
}

}  // namespace avmarket
