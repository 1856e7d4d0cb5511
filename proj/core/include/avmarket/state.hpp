#pragma once

#include <array>

#include "avmarket/types.hpp"

namespace avmarket {

// Full per-period endogenous state. Index order of utilities/probabilities
// follows kChoices.
struct EquilibriumState {
  double trip_time_tr = 0.0;
  double pickup_time_tp = 0.0;
  double customer_wait_wc = 0.0;
  double vehicle_idle_wt = 0.0;
  double rides_per_vehicle_n0 = 0.0;
  double fleet_N = 0.0;
  double rented_Nr = 0.0;
  double demand_qo = 0.0;
  double demand_qa = 0.0;
  double demand_qm = 0.0;
  double demand_qp = 0.0;
  std::array<double, kNumChoices> utilities{};
  std::array<double, kNumChoices> probabilities{};
};

struct SolveResult {
  EquilibriumState state;
  int iterations = 0;
  double residual = 0.0;  // ||Phi(x) - x||_inf at the returned point
};

}  // namespace avmarket
