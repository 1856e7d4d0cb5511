#pragma once

#include <string>
#include <vector>

#include "avmarket/state.hpp"
#include "avmarket/types.hpp"

namespace avmarket {

struct TraceRow {
  int period = 0;
  int start_index = 0;
  int iteration = 0;
  double fare = 0.0;
  double payment = 0.0;
  double objective = 0.0;
  double projected_gradient_norm = 0.0;
  double step = 0.0;
};

struct LambdaStep {
  double lambda = 0.0;
  double operating_profit = 0.0;
};

struct ScenarioResult {
  ScenarioSpec scenario;
  PricingDecision prices;
  std::vector<EquilibriumState> states;   // one per period
  std::vector<SolveResult> solves;        // convergence diagnostics per period
  double daily_profit = 0.0;
  double daily_welfare = 0.0;
  double operating_profit = 0.0;          // before fixed costs
  double lambda = 0.0;                    // second-best multiplier
  double floor = 0.0;                     // second-best revenue floor
  double constraint_slack = 0.0;          // operating_profit - floor
  bool optimal = true;                    // false if any line search stalled
  std::vector<TraceRow> trace;
  std::vector<LambdaStep> lambda_history;  // second-best bisection path
};

// Projected gradient ascent per period (the objectives separate across
// periods), multi-start, Armijo backtracking, nonnegativity projection.
// Second-best wraps the Lagrangian in a bisection on lambda.
ScenarioResult optimize(const ScenarioSpec& scenario, const ExperimentConfig& config);

}  // namespace avmarket
