#pragma once

#include <array>
#include <span>

#include "avmarket/types.hpp"

namespace avmarket {

// Fixed-point inputs the utilities depend on.
struct UtilityInputs {
  double trip_time_tr = 0.0;
  double pickup_time_tp = 0.0;
  double customer_wait_wc = 0.0;
  double rides_per_vehicle_n0 = 0.0;
};

// Disutility assigned to the on-demand mode when the platform can never field
// a vehicle (no prepurchased fleet and no AV-owning population).
inline constexpr double kNoServiceUtility = -1e6;

double travel_utility(TravelMode mode, const UtilityInputs& in, const PricePoint& price,
                      const EconomicParams& econ, bool crowdsourcing_available);
double rental_utility(RentalChoice rental, double n0, double payment_p,
                      const EconomicParams& econ);

// V for every entry of kChoices at the given inputs.
std::array<double, kNumChoices> assemble_utilities(const UtilityInputs& in,
                                                   const PricePoint& price,
                                                   const EconomicParams& econ,
                                                   bool crowdsourcing_available);

// Overflow-safe softmax with scale mu over one class's utilities; mu = 0 gives
// the uniform distribution.
void logit_probabilities(std::span<const double> utilities, double mu, std::span<double> out);

// Two-level model over one class's slice of kChoices. mu_r > mu_t nests rental
// inside travel; mu_r < mu_t nests travel inside rental; equal scales reduce to
// the flat logit.
void nested_logit_probabilities(std::span<const double> utilities, double mu_r, double mu_t,
                                ClassLabel cls, std::span<double> out);

// Probabilities for all 21 choices under the configured choice model.
std::array<double, kNumChoices> choice_probabilities(const std::array<double, kNumChoices>& V,
                                                     const ChoiceModel& cm);

// Expected maximum utility (1/mu) ln sum exp(mu V); requires mu > 0.
double class_logsum(std::span<const double> utilities, double mu);

}  // namespace avmarket
