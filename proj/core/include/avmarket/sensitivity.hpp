#pragma once

#include <Eigen/Dense>

#include "avmarket/state.hpp"
#include "avmarket/types.hpp"

namespace avmarket {

// Variable vector tau: times, service rate, fleet, demands, utilities,
// probabilities. Residual rows are ordered (f_u, f_pi, f_n, f_t).
namespace tau {
inline constexpr int kTr = 0;
inline constexpr int kTp = 1;
inline constexpr int kWc = 2;
inline constexpr int kWt = 3;
inline constexpr int kN0 = 4;
inline constexpr int kN = 5;
inline constexpr int kNr = 6;
inline constexpr int kQo = 7;
inline constexpr int kQa = 8;
inline constexpr int kQm = 9;
inline constexpr int kQp = 10;
inline constexpr int kV = 11;               // 21 entries
inline constexpr int kPi = 11 + kNumChoices;  // 21 entries
inline constexpr int kDim = 11 + 2 * kNumChoices;
}  // namespace tau

namespace res {
inline constexpr int kU = 0;                    // 21 rows: V - utility formula
inline constexpr int kPi = kNumChoices;         // 21 rows: pi - choice model
inline constexpr int kN = 2 * kNumChoices;      // 8 rows: fleet, demands, service, idle
inline constexpr int kT = 2 * kNumChoices + 8;  // 3 rows: trip, pickup, wait
inline constexpr int kDim = tau::kDim;
}  // namespace res

Eigen::VectorXd pack_state(const EquilibriumState& state);
EquilibriumState unpack_state(const Eigen::VectorXd& tau_vec);

// Residual f(tau; prices) whose root is the market equilibrium.
Eigen::VectorXd residual_vector(const Eigen::VectorXd& tau_vec, const PricePoint& price,
                                const ExperimentConfig& config, const PeriodSpec& period);

struct JacobianBundle {
  Eigen::MatrixXd J_tau;    // d f / d tau, kDim x kDim
  Eigen::MatrixXd J_theta;  // d f / d (F_o, p), kDim x 2
};

JacobianBundle residual_jacobian(const EquilibriumState& state, const PricePoint& price,
                                 const ExperimentConfig& config, const PeriodSpec& period);

struct SensitivityResult {
  Eigen::MatrixXd S;  // d tau / d (F_o, p), kDim x 2
  double rcond = 0.0;
  bool regular = false;  // false: ill-conditioned J_tau, caller should fall back to FD
};

SensitivityResult equilibrium_sensitivity(const JacobianBundle& bundle);

// d pi / d V within one class under the flat logit (analytic); nested models use
// central finite differences of the probability map.
Eigen::MatrixXd probability_jacobian(const std::array<double, kNumChoices>& V,
                                     const ChoiceModel& cm);

struct PeriodGradient {
  double d_fare = 0.0;
  double d_payment = 0.0;
  bool via_fd = false;  // true when the implicit-function path was unavailable
};

// Total derivative of one period's objective contribution with respect to that
// period's prices. lambda weights operating profit inside the Lagrangian
// (monopoly: profit only; first-best: welfare only).
PeriodGradient objective_gradient(ScenarioKind kind, double lambda,
                                  const EquilibriumState& state, const PricePoint& price,
                                  const ExperimentConfig& config, const PeriodSpec& period);

}  // namespace avmarket
