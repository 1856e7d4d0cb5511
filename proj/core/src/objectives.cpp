#include "avmarket/objectives.hpp"

#include <array>
#include <cmath>
#include <span>

#include "avmarket/choice.hpp"
#include "avmarket/errors.hpp"

namespace avmarket {

double operating_profit(const EquilibriumState& state, const PricePoint& price, double window_h) {
  return price.fare_Fo * state.demand_qo * window_h -
         state.rented_Nr * price.payment_p * state.rides_per_vehicle_n0;
}

namespace {

// Expected maximum utility per capita for one class under the configured model.
double model_logsum(std::span<const double> V, ClassLabel cls, const ChoiceModel& cm) {
  if (!cm.nested) return class_logsum(V, cm.mu);
  if (cm.mu_r == cm.mu_t) return class_logsum(V, cm.mu_r);
  // Composite of inner logsums taken at the outer scale.
  const bool travel_outer = cm.mu_r > cm.mu_t;
  const double inner_mu = travel_outer ? cm.mu_r : cm.mu_t;
  const double outer_mu = travel_outer ? cm.mu_t : cm.mu_r;
  const int off = class_offset(cls);
  const int sz = class_size(cls);
  std::array<double, 8> inclusive{};
  std::array<int, 8> keys{};
  int num_groups = 0;
  std::array<std::array<double, 8>, 8> members{};
  std::array<int, 8> counts{};
  for (int j = 0; j < sz; ++j) {
    const ChoiceRef& c = kChoices[off + j];
    const int key = travel_outer ? static_cast<int>(c.travel) : static_cast<int>(c.rental);
    int g = -1;
    for (int t = 0; t < num_groups; ++t)
      if (keys[t] == key) { g = t; break; }
    if (g < 0) {
      g = num_groups++;
      keys[g] = key;
    }
    members[g][counts[g]++] = V[j];
  }
  for (int g = 0; g < num_groups; ++g)
    inclusive[g] = class_logsum(std::span<const double>(members[g].data(), counts[g]), inner_mu);
  return class_logsum(std::span<const double>(inclusive.data(), num_groups), outer_mu);
}

}  // namespace

double period_welfare(const EquilibriumState& state, const PricePoint& price,
                      const ExperimentConfig& config, const PeriodSpec& period) {
  const ChoiceModel& cm = config.choice_model;
  if (!cm.nested && cm.mu <= 0.0)
    throw ContractViolation("welfare requires a positive logit scale");
  double total = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    const double d = period.populations[c];
    if (d == 0.0) continue;
    const auto cls = static_cast<ClassLabel>(c);
    std::span<const double> V(state.utilities.data() + class_offset(cls), class_size(cls));
    total += d * model_logsum(V, cls, cm);
  }
  return total + operating_profit(state, price, period.decision_window_h);
}

double daily_operating_profit(const PricingDecision& prices,
                              const std::vector<EquilibriumState>& states,
                              const ExperimentConfig& config) {
  const auto periods = config.periods();
  if (prices.size() != periods.size() || states.size() != periods.size())
    throw ContractViolation("periods, prices, and states must align");
  double total = 0.0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    total += periods[k].duration_Hk / periods[k].decision_window_h *
             operating_profit(states[k], prices[k], periods[k].decision_window_h);
  }
  return total;
}

double daily_profit(const PricingDecision& prices, const std::vector<EquilibriumState>& states,
                    const ExperimentConfig& config) {
  const auto& e = config.econ;
  return daily_operating_profit(prices, states, config) -
         e.prepurchased_Ns * (e.purchase_amortized_g + e.maintenance_amortized_z) - e.fixed_cost_Cf;
}

double daily_welfare(const PricingDecision& prices, const std::vector<EquilibriumState>& states,
                     const ExperimentConfig& config) {
  const auto periods = config.periods();
  if (prices.size() != periods.size() || states.size() != periods.size())
    throw ContractViolation("periods, prices, and states must align");
  double total = 0.0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    total += periods[k].duration_Hk / periods[k].decision_window_h *
             period_welfare(states[k], prices[k], config, periods[k]);
  }
  return total;
}

double profit_floor(const ExperimentConfig& config, double rho) {
  const auto& e = config.econ;
  return rho * (e.prepurchased_Ns * (e.purchase_amortized_g + e.maintenance_amortized_z) +
                e.fixed_cost_Cf);
}

}  // namespace avmarket
