#pragma once

#include "avmarket/types.hpp"

namespace avmarket {

// x^exponent for x >= epsilon, continued below epsilon by the tangent line at
// epsilon; C^1 on the whole real line.
struct SmoothedPower {
  double exponent;
  double epsilon;

  double eval(double x) const;
  double deriv(double x) const;
};

inline SmoothedPower xi1(const CityParams& city) {
  return {-city.matching_alpha1 / city.matching_alpha2, city.xi1_epsilon};
}
inline SmoothedPower xi2(const CityParams& city) {
  return {-0.5, city.xi2_epsilon};
}

// Average customer search time; requires q_o > 0.
double customer_wait(double q_o, double w_t, const CityParams& city);

// Average deadheading pick-up time.
double pickup_time(double w_t, double q_o, double t_r, const CityParams& city);

// Road traffic flow entering the congestion function.
double effective_flow(double q_m, double q_a, double q_o, double w_t, const CityParams& city);

// Congested door-to-door trip time a + b x^2 on the effective flow.
double trip_time(double q_m, double q_a, double q_o, double w_t, const CityParams& city);

}  // namespace avmarket
