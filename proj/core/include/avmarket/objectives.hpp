#pragma once

#include <vector>

#include "avmarket/state.hpp"
#include "avmarket/types.hpp"

namespace avmarket {

// Per-hour platform operating profit in one period: fare revenue minus owner payments.
double operating_profit(const EquilibriumState& state, const PricePoint& price, double window_h);

// Per-hour social surplus in one period: population-weighted logsums plus the
// platform's operating profit (money changing hands nets out once).
double period_welfare(const EquilibriumState& state, const PricePoint& price,
                      const ExperimentConfig& config, const PeriodSpec& period);

// Operating profit summed over the day, before fixed costs.
double daily_operating_profit(const PricingDecision& prices,
                              const std::vector<EquilibriumState>& states,
                              const ExperimentConfig& config);

// Daily profit net of fleet amortization and fixed cost.
double daily_profit(const PricingDecision& prices, const std::vector<EquilibriumState>& states,
                    const ExperimentConfig& config);

double daily_welfare(const PricingDecision& prices, const std::vector<EquilibriumState>& states,
                     const ExperimentConfig& config);

// rho * (N_s (g + z) + C_f), the second-best revenue floor.
double profit_floor(const ExperimentConfig& config, double rho);

}  // namespace avmarket
