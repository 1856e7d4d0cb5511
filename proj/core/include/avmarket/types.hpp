#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace avmarket {

// Travel modes: O = crowdsourced on-demand AV ride, A = private AV, M = manual
// drive, P = public transit, None = stay home.
enum class TravelMode : std::uint8_t { O, A, M, P, None };

// Per-period decision of an AV owner: R = rent the vehicle out, N = keep it,
// None = the class owns no AV.
enum class RentalChoice : std::uint8_t { R, N, None };

// Citizen classes: n = no vehicle, r = MV only, a = AV owner who travels,
// ap = AV owner without travel need, b / bp = dual owners (with/without need).
enum class ClassLabel : std::uint8_t { n, r, a, ap, b, bp };
inline constexpr int kNumClasses = 6;

struct Choice {
  TravelMode travel;
  RentalChoice rental;
};

struct ChoiceRef {
  ClassLabel cls;
  TravelMode travel;
  RentalChoice rental;
};

// Flattened enumeration of every admissible (class, travel, rental) choice.
inline constexpr std::array<ChoiceRef, 21> kChoices = {{
    {ClassLabel::n, TravelMode::O, RentalChoice::None},
    {ClassLabel::n, TravelMode::P, RentalChoice::None},
    {ClassLabel::r, TravelMode::O, RentalChoice::None},
    {ClassLabel::r, TravelMode::M, RentalChoice::None},
    {ClassLabel::r, TravelMode::P, RentalChoice::None},
    {ClassLabel::a, TravelMode::A, RentalChoice::N},
    {ClassLabel::a, TravelMode::O, RentalChoice::N},
    {ClassLabel::a, TravelMode::O, RentalChoice::R},
    {ClassLabel::a, TravelMode::P, RentalChoice::N},
    {ClassLabel::a, TravelMode::P, RentalChoice::R},
    {ClassLabel::ap, TravelMode::None, RentalChoice::N},
    {ClassLabel::ap, TravelMode::None, RentalChoice::R},
    {ClassLabel::b, TravelMode::A, RentalChoice::N},
    {ClassLabel::b, TravelMode::M, RentalChoice::N},
    {ClassLabel::b, TravelMode::M, RentalChoice::R},
    {ClassLabel::b, TravelMode::O, RentalChoice::N},
    {ClassLabel::b, TravelMode::O, RentalChoice::R},
    {ClassLabel::b, TravelMode::P, RentalChoice::N},
    {ClassLabel::b, TravelMode::P, RentalChoice::R},
    {ClassLabel::bp, TravelMode::None, RentalChoice::N},
    {ClassLabel::bp, TravelMode::None, RentalChoice::R},
}};
inline constexpr int kNumChoices = 21;
// kClassOffset[c] .. kClassOffset[c+1] is class c's slice of kChoices.
inline constexpr std::array<int, kNumClasses + 1> kClassOffset = {0, 2, 5, 10, 12, 19, 21};

inline constexpr int class_offset(ClassLabel c) { return kClassOffset[static_cast<int>(c)]; }
inline constexpr int class_size(ClassLabel c) {
  return kClassOffset[static_cast<int>(c) + 1] - kClassOffset[static_cast<int>(c)];
}
inline constexpr bool owns_av(ClassLabel c) {
  return c == ClassLabel::a || c == ClassLabel::ap || c == ClassLabel::b || c == ClassLabel::bp;
}
inline constexpr bool owns_mv(ClassLabel c) {
  return c == ClassLabel::r || c == ClassLabel::b;
}
inline constexpr bool has_travel_need(ClassLabel c) {
  return c != ClassLabel::ap && c != ClassLabel::bp;
}
const char* class_name(ClassLabel c);
const char* mode_name(TravelMode m);
const char* rental_name(RentalChoice r);

struct CityParams {
  double area_R = 400.0;              // km^2
  double free_flow_speed_v0 = 40.0;   // km/h
  double grid_constant_k = 0.63;
  double trip_factor_kappa = 1.0;
  double congestion_base_a = 0.5;     // h
  double congestion_coeff_b = 2.67e-12;  // h per (veh/h)^2
  double av_occupation_alpha = 0.7;
  double matching_A = 1.5;
  double matching_alpha1 = 0.7;
  double matching_alpha2 = 0.7;
  double xi1_epsilon = 1e-3;  // h, threshold on w_t
  double xi2_epsilon = 1.0;   // veh, threshold on w_t*q_o

  double theta() const { return grid_constant_k / trip_factor_kappa; }
};

struct EconomicParams {
  double beta_A = 20.0;   // $/h on-board, AV
  double beta_P = 30.0;   // $/h on-board, transit
  double beta_M = 40.0;   // $/h on-board, manual
  double gamma = 30.0;    // $/h waiting
  double transit_time_tn = 1.0;   // h
  double transit_fare_Fn = 6.0;   // $
  double sharing_cost_m = 20.0;   // $/period
  double purchase_amortized_g = 100000.0 / 3650.0;  // $/day
  double maintenance_amortized_z = 5000.0 / 365.0;  // $/day
  double fixed_cost_Cf = 6e5;     // $/day
  double prepurchased_Ns = 0.0;   // vehicles
  double profit_floor_rate_rho = 1.0;
};

struct ChoiceModel {
  double mu = 0.1;      // 1/$, flat logit scale
  bool nested = false;  // use the two-level model instead of flat logit
  double mu_r = 0.1;    // rental-level scale
  double mu_t = 0.1;    // travel-level scale
};

struct PeriodSpec {
  double duration_Hk = 0.0;       // h in the day
  double decision_window_h = 1.0; // h, the per-period accounting window
  std::array<double, kNumClasses> populations{};  // persons, indexed by ClassLabel
};

// Inputs for deriving per-class populations when no explicit periods are given:
// travel need is allocated to ownership groups in proportion to group size.
struct PopulationModel {
  double density_per_km2 = 5000.0;
  double vehicle_owner_share = 0.3;
  double av_penetration = 0.1;      // AV owners / vehicle owners
  double peak_travel_share = 0.15;  // travelers per hour / total population
  double offpeak_travel_share = 0.05;
  double peak_hours = 4.0;
  double offpeak_hours = 20.0;
  double decision_window_h = 1.0;
};

struct PricePoint {
  double fare_Fo = 0.0;   // $/trip
  double payment_p = 0.0; // $/ride paid to the owner
};

using PricingDecision = std::vector<PricePoint>;  // one entry per period

struct SolverSettings {
  double lambda_fp = 0.5;
  int max_iterations = 10000;
  double residual_tolerance = 1e-10;
  double demand_floor = 1e-6;  // trips/h
};

struct OptimizerSettings {
  int max_iterations = 400;
  double gradient_tolerance = 1e-6;  // on the objective-scaled projected gradient
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;  // $ move per unit direction
  int multistart = 4;
};

struct LambdaLoopSettings {
  double lambda_max = 1e3;
  double profit_match_rtol = 1e-3;
  int max_bisections = 60;
};

enum class ScenarioKind { monopoly, first_best, second_best };
const char* scenario_name(ScenarioKind k);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::monopoly;
  double rho = 1.0;  // second-best only
};

enum class SweepParameter { mu, population_density, av_penetration, alpha, N_s, m };
const char* sweep_parameter_name(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(const std::string& name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::mu;
  std::vector<double> values;  // non-empty, ascending
  std::vector<ScenarioSpec> scenarios;
  int jobs = 1;
};

struct ExperimentConfig {
  CityParams city;
  EconomicParams econ;
  ChoiceModel choice_model;
  PopulationModel population;
  std::optional<std::vector<PeriodSpec>> explicit_periods;
  SolverSettings solver;
  OptimizerSettings optimizer;
  LambdaLoopSettings lambda_loop;
  std::vector<ScenarioKind> scenarios = {ScenarioKind::monopoly, ScenarioKind::first_best,
                                         ScenarioKind::second_best};
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";

  // Explicit periods win over the derived ones.
  std::vector<PeriodSpec> periods() const;
  double total_population() const { return city.area_R * population.density_per_km2; }
};

bool operator==(const CityParams&, const CityParams&);
bool operator==(const EconomicParams&, const EconomicParams&);
bool operator==(const ChoiceModel&, const ChoiceModel&);
bool operator==(const PeriodSpec&, const PeriodSpec&);
bool operator==(const PopulationModel&, const PopulationModel&);
bool operator==(const SolverSettings&, const SolverSettings&);
bool operator==(const OptimizerSettings&, const OptimizerSettings&);
bool operator==(const LambdaLoopSettings&, const LambdaLoopSettings&);
bool operator==(const ScenarioSpec&, const ScenarioSpec&);
bool operator==(const SweepSpec&, const SweepSpec&);
bool operator==(const ExperimentConfig&, const ExperimentConfig&);

}  // namespace avmarket
