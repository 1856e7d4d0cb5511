#include "avmarket/kinematics.hpp"

#include <cmath>

#include "avmarket/errors.hpp"

namespace avmarket {

double SmoothedPower::eval(double x) const {
  if (x >= epsilon) return std::pow(x, exponent);
  // Tangent line at epsilon keeps value and slope continuous.
  const double fe = std::pow(epsilon, exponent);
  return fe + exponent * fe / epsilon * (x - epsilon);
}

double SmoothedPower::deriv(double x) const {
  if (x >= epsilon) return exponent * std::pow(x, exponent - 1.0);
  return exponent * std::pow(epsilon, exponent - 1.0);
}

double customer_wait(double q_o, double w_t, const CityParams& city) {
  if (q_o <= 0.0) throw ContractViolation("customer_wait requires q_o > 0");
  const double exp_qo = (1.0 - city.matching_alpha1 - city.matching_alpha2) / city.matching_alpha2;
  return std::pow(q_o, exp_qo) * std::pow(city.matching_A, -1.0 / city.matching_alpha2) *
         xi1(city).eval(w_t);
}

double pickup_time(double w_t, double q_o, double t_r, const CityParams& city) {
  return city.theta() * xi2(city).eval(w_t * q_o) * t_r;
}

double effective_flow(double q_m, double q_a, double q_o, double w_t, const CityParams& city) {
  if (q_a < q_o) throw ContractViolation("effective_flow requires q_a >= q_o");
  const double alpha = city.av_occupation_alpha;
  const double deadhead = 1.0 + city.theta() * xi2(city).eval(w_t * q_o);
  return q_m + alpha * (q_a - q_o) + alpha * q_o * deadhead;
}

double trip_time(double q_m, double q_a, double q_o, double w_t, const CityParams& city) {
  const double x = effective_flow(q_m, q_a, q_o, w_t, city);
  return city.congestion_base_a + city.congestion_coeff_b * x * x;
}

}  // namespace avmarket
