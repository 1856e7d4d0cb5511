#pragma once

#include <array>

#include "avmarket/state.hpp"
#include "avmarket/types.hpp"

namespace avmarket {

struct SupplyResult {
  double rented_Nr;
  double fleet_N;
};

struct DemandResult {
  double q_o;
  double q_a;
  double q_m;
  double q_p;
};

// Fleet size from rental choices: N_r = sum over AV classes of d * pi(R), N = N_s + N_r.
SupplyResult supply_from_choices(const std::array<double, kNumChoices>& probabilities,
                                 const std::array<double, kNumClasses>& populations,
                                 double prepurchased_Ns);

// Hourly trip rates by mode; q_a includes the crowdsourced trips.
DemandResult demand_from_choices(const std::array<double, kNumChoices>& probabilities,
                                 const std::array<double, kNumClasses>& populations,
                                 double window_h);

// Rides served per vehicle per period; 0 when there is no fleet.
double service_rate(double fleet_N, double q_o, double window_h);

// Per-ride vehicle idle time; may be negative away from equilibrium.
double idle_time(double fleet_N, double q_o_floored, double t_p, double t_r);

// Reduced fixed-point vector (t_r, n0, t_p, w_c).
using PhiVector = std::array<double, 4>;

// One application of the equilibrium mapping plus every intermediate quantity.
struct PhiEval {
  PhiVector next;
  EquilibriumState state;  // consistent downstream values at the *input* point
};

bool crowdsourcing_available(const ExperimentConfig& config, const PeriodSpec& period);

PhiEval phi_map(const PhiVector& current, const PricePoint& price,
                const ExperimentConfig& config, const PeriodSpec& period);

// Damped fixed-point iteration with a Newton fallback on Phi(x) - x; throws
// NonConvergenceError with the residual trace when the budget is exhausted.
SolveResult solve_equilibrium(const PricePoint& price, const ExperimentConfig& config,
                              const PeriodSpec& period, const SolverSettings& settings);

inline SolveResult solve_equilibrium(const PricePoint& price, const ExperimentConfig& config,
                                     const PeriodSpec& period) {
  return solve_equilibrium(price, config, period, config.solver);
}

}  // namespace avmarket
