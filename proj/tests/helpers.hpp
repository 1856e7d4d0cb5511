#pragma once

// Shared fixtures plus naive reference implementations. The references
// restate the model arithmetic in the most direct form available (no
// overflow guards, no shared code with the library) so agreement is a real
// cross-check and not an identity.

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include <avmarket/types.hpp>

namespace avmtest {

using namespace avmarket;

// Plain softmax; callers keep |mu V| small.
inline std::vector<double> naive_logit(const std::vector<double>& V, double mu) {
  double z = 0.0;
  for (double v : V) z += std::exp(mu * v);
  std::vector<double> out;
  out.reserve(V.size());
  for (double v : V) out.push_back(std::exp(mu * v) / z);
  return out;
}

struct LabeledChoice {
  TravelMode travel;
  RentalChoice rental;
  double V;
};

// Two-level probabilities straight from the closed form: the larger scale
// prices the within-nest choice, the smaller one weighs nest inclusive
// values. Grouping is by travel mode when mu_r >= mu_t and by rental choice
// otherwise.
inline std::vector<double> naive_nested(const std::vector<LabeledChoice>& cs, double mu_r,
                                        double mu_t) {
  const bool rental_inner = mu_r >= mu_t;
  const double mu_in = rental_inner ? mu_r : mu_t;
  const double mu_out = rental_inner ? mu_t : mu_r;
  auto nest_of = [&](const LabeledChoice& c) {
    return rental_inner ? static_cast<int>(c.travel) : static_cast<int>(c.rental);
  };
  std::map<int, double> denom;  // nest -> sum exp(mu_in V)
  for (const auto& c : cs) denom[nest_of(c)] += std::exp(mu_in * c.V);
  double outer = 0.0;
  for (const auto& [key, d] : denom) outer += std::pow(d, mu_out / mu_in);
  std::vector<double> out;
  out.reserve(cs.size());
  for (const auto& c : cs) {
    const double d = denom[nest_of(c)];
    const double within = std::exp(mu_in * c.V) / d;
    const double across = std::pow(d, mu_out / mu_in) / outer;
    out.push_back(within * across);
  }
  return out;
}

// Index lookup by labels; avoids relying on slice index arithmetic.
inline int pi_of_index(const ChoiceRef& ref) {
  for (int i = 0; i < kNumChoices; ++i) {
    if (kChoices[i].cls == ref.cls && kChoices[i].travel == ref.travel &&
        kChoices[i].rental == ref.rental)
      return i;
  }
  throw std::logic_error("choice not in enumeration");
}

inline double pi_of(const std::array<double, kNumChoices>& pi, ClassLabel c, TravelMode t,
                    RentalChoice r) {
  return pi[pi_of_index({c, t, r})];
}

// Fleet from rentals, term by term over the four AV-owning classes.
inline double oracle_rented(const std::array<double, kNumChoices>& pi,
                            const std::array<double, kNumClasses>& d) {
  auto dd = [&](ClassLabel c) { return d[static_cast<int>(c)]; };
  return dd(ClassLabel::a) * (pi_of(pi, ClassLabel::a, TravelMode::P, RentalChoice::R) +
                              pi_of(pi, ClassLabel::a, TravelMode::O, RentalChoice::R)) +
         dd(ClassLabel::ap) * pi_of(pi, ClassLabel::ap, TravelMode::None, RentalChoice::R) +
         dd(ClassLabel::b) * (pi_of(pi, ClassLabel::b, TravelMode::P, RentalChoice::R) +
                              pi_of(pi, ClassLabel::b, TravelMode::M, RentalChoice::R) +
                              pi_of(pi, ClassLabel::b, TravelMode::O, RentalChoice::R)) +
         dd(ClassLabel::bp) * pi_of(pi, ClassLabel::bp, TravelMode::None, RentalChoice::R);
}

struct OracleDemand {
  double q_o, q_a, q_m, q_p;
};

// Mode flows summed term by term, then divided by the window.
inline OracleDemand oracle_demand(const std::array<double, kNumChoices>& pi,
                                  const std::array<double, kNumClasses>& d, double h) {
  auto dd = [&](ClassLabel c) { return d[static_cast<int>(c)]; };
  auto p = [&](ClassLabel c, TravelMode t, RentalChoice r) { return pi_of(pi, c, t, r); };
  const double oh = dd(ClassLabel::n) * p(ClassLabel::n, TravelMode::O, RentalChoice::None) +
                    dd(ClassLabel::r) * p(ClassLabel::r, TravelMode::O, RentalChoice::None) +
                    dd(ClassLabel::a) * (p(ClassLabel::a, TravelMode::O, RentalChoice::N) +
                                         p(ClassLabel::a, TravelMode::O, RentalChoice::R)) +
                    dd(ClassLabel::b) * (p(ClassLabel::b, TravelMode::O, RentalChoice::N) +
                                         p(ClassLabel::b, TravelMode::O, RentalChoice::R));
  const double ah = oh + dd(ClassLabel::a) * p(ClassLabel::a, TravelMode::A, RentalChoice::N) +
                    dd(ClassLabel::b) * p(ClassLabel::b, TravelMode::A, RentalChoice::N);
  const double mh = dd(ClassLabel::r) * p(ClassLabel::r, TravelMode::M, RentalChoice::None) +
                    dd(ClassLabel::b) * (p(ClassLabel::b, TravelMode::M, RentalChoice::N) +
                                         p(ClassLabel::b, TravelMode::M, RentalChoice::R));
  const double ph = dd(ClassLabel::n) * p(ClassLabel::n, TravelMode::P, RentalChoice::None) +
                    dd(ClassLabel::r) * p(ClassLabel::r, TravelMode::P, RentalChoice::None) +
                    dd(ClassLabel::a) * (p(ClassLabel::a, TravelMode::P, RentalChoice::N) +
                                         p(ClassLabel::a, TravelMode::P, RentalChoice::R)) +
                    dd(ClassLabel::b) * (p(ClassLabel::b, TravelMode::P, RentalChoice::N) +
                                         p(ClassLabel::b, TravelMode::P, RentalChoice::R));
  return {oh / h, ah / h, mh / h, ph / h};
}

// Random probability table: per class a point on the simplex.
inline std::array<double, kNumChoices> random_probabilities(std::mt19937& rng) {
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  std::array<double, kNumChoices> pi{};
  for (int c = 0; c < kNumClasses; ++c) {
    double z = 0.0;
    for (int i = kClassOffset[c]; i < kClassOffset[c + 1]; ++i) z += (pi[i] = uni(rng));
    for (int i = kClassOffset[c]; i < kClassOffset[c + 1]; ++i) pi[i] /= z;
  }
  return pi;
}

// One explicit 24 h period with the given class populations.
inline ExperimentConfig single_period_config(const std::array<double, kNumClasses>& pops,
                                             double window_h = 1.0) {
  ExperimentConfig config;
  PeriodSpec period;
  period.duration_Hk = 24.0;
  period.decision_window_h = window_h;
  period.populations = pops;
  config.explicit_periods = std::vector<PeriodSpec>{period};
  return config;
}

}  // namespace avmtest
