#include "avmarket/choice.hpp"

#include <algorithm>
#include <cmath>

#include "avmarket/errors.hpp"

namespace avmarket {

const char* class_name(ClassLabel c) {
  switch (c) {
    case ClassLabel::n: return "n";
    case ClassLabel::r: return "r";
    case ClassLabel::a: return "a";
    case ClassLabel::ap: return "a'";
    case ClassLabel::b: return "b";
    case ClassLabel::bp: return "b'";
  }
  return "?";
}

const char* mode_name(TravelMode m) {
  switch (m) {
    case TravelMode::O: return "O";
    case TravelMode::A: return "A";
    case TravelMode::M: return "M";
    case TravelMode::P: return "P";
    case TravelMode::None: return "-";
  }
  return "?";
}

const char* rental_name(RentalChoice r) {
  switch (r) {
    case RentalChoice::R: return "R";
    case RentalChoice::N: return "N";
    case RentalChoice::None: return "-";
  }
  return "?";
}

const char* scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::monopoly: return "monopoly";
    case ScenarioKind::first_best: return "first-best";
    case ScenarioKind::second_best: return "second-best";
  }
  return "?";
}

double travel_utility(TravelMode mode, const UtilityInputs& in, const PricePoint& price,
                      const EconomicParams& econ, bool crowdsourcing_available) {
  switch (mode) {
    case TravelMode::O:
      if (!crowdsourcing_available) return kNoServiceUtility;
      return -price.fare_Fo - econ.beta_A * in.trip_time_tr -
             econ.gamma * (in.customer_wait_wc + in.pickup_time_tp);
    case TravelMode::A:
      return -econ.beta_A * in.trip_time_tr;
    case TravelMode::M:
      return -econ.beta_M * in.trip_time_tr;
    case TravelMode::P:
      return -econ.transit_fare_Fn - econ.beta_P * econ.transit_time_tn;
    case TravelMode::None:
      return 0.0;
  }
  throw ContractViolation("unknown travel mode");
}

double rental_utility(RentalChoice rental, double n0, double payment_p,
                      const EconomicParams& econ) {
  if (rental == RentalChoice::R) return payment_p * n0 - econ.sharing_cost_m;
  return 0.0;
}

std::array<double, kNumChoices> assemble_utilities(const UtilityInputs& in,
                                                   const PricePoint& price,
                                                   const EconomicParams& econ,
                                                   bool crowdsourcing_available) {
  std::array<double, kNumChoices> V;
  for (int i = 0; i < kNumChoices; ++i) {
    V[i] = travel_utility(kChoices[i].travel, in, price, econ, crowdsourcing_available) +
           rental_utility(kChoices[i].rental, in.rides_per_vehicle_n0, price.payment_p, econ);
  }
  return V;
}

void logit_probabilities(std::span<const double> utilities, double mu, std::span<double> out) {
  const std::size_t n = utilities.size();
  if (n == 0) throw ContractViolation("logit over empty choice set");
  if (mu < 0.0) throw ContractViolation("negative logit scale");
  if (mu == 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    return;
  }
  const double vmax = *std::max_element(utilities.begin(), utilities.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(mu * (utilities[i] - vmax));
    sum += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
}

namespace {

// Logsum with the max factored out, valid for any finite inputs.
double stable_logsum(std::span<const double> utilities, double mu) {
  const double vmax = *std::max_element(utilities.begin(), utilities.end());
  double sum = 0.0;
  for (double v : utilities) sum += std::exp(mu * (v - vmax));
  return vmax + std::log(sum) / mu;
}

}  // namespace

void nested_logit_probabilities(std::span<const double> utilities, double mu_r, double mu_t,
                                ClassLabel cls, std::span<double> out) {
  if (mu_r <= 0.0 || mu_t <= 0.0) throw ContractViolation("nested logit requires positive scales");
  const int off = class_offset(cls);
  const int sz = class_size(cls);
  if (static_cast<int>(utilities.size()) != sz)
    throw ContractViolation("utility span does not match class choice set");
  if (mu_r == mu_t) {
    logit_probabilities(utilities, mu_r, out);
    return;
  }

  // Outer level groups by travel mode (rental nested inside, scale mu_r) when
  // mu_r > mu_t, and by rental choice (travel nested inside, scale mu_t)
  // otherwise; the outer scale is the smaller one.
  const bool travel_outer = mu_r > mu_t;
  const double inner_mu = travel_outer ? mu_r : mu_t;
  const double outer_mu = travel_outer ? mu_t : mu_r;

  auto group_key = [&](int j) {
    const ChoiceRef& c = kChoices[off + j];
    return travel_outer ? static_cast<int>(c.travel) : static_cast<int>(c.rental);
  };

  std::array<int, 8> keys{};
  int num_groups = 0;
  std::array<int, 8> group_of{};  // per choice, index into keys
  for (int j = 0; j < sz; ++j) {
    const int k = group_key(j);
    int g = -1;
    for (int t = 0; t < num_groups; ++t)
      if (keys[t] == k) { g = t; break; }
    if (g < 0) {
      g = num_groups++;
      keys[g] = k;
    }
    group_of[j] = g;
  }

  // Inner softmax within each group and its inclusive value.
  std::array<double, 8> inclusive{};
  std::array<double, 8> inner_prob{};
  for (int g = 0; g < num_groups; ++g) {
    std::array<double, 8> vals{};
    int cnt = 0;
    for (int j = 0; j < sz; ++j)
      if (group_of[j] == g) vals[cnt++] = utilities[j];
    inclusive[g] = stable_logsum(std::span<const double>(vals.data(), cnt), inner_mu);
  }
  // Outer softmax over inclusive values.
  std::array<double, 8> outer_prob{};
  logit_probabilities(std::span<const double>(inclusive.data(), num_groups), outer_mu,
                      std::span<double>(outer_prob.data(), num_groups));
  for (int g = 0; g < num_groups; ++g) {
    std::array<double, 8> vals{};
    std::array<int, 8> idx{};
    int cnt = 0;
    for (int j = 0; j < sz; ++j)
      if (group_of[j] == g) {
        idx[cnt] = j;
        vals[cnt++] = utilities[j];
      }
    logit_probabilities(std::span<const double>(vals.data(), cnt), inner_mu,
                        std::span<double>(inner_prob.data(), cnt));
    for (int t = 0; t < cnt; ++t) out[idx[t]] = outer_prob[g] * inner_prob[t];
  }
}

std::array<double, kNumChoices> choice_probabilities(const std::array<double, kNumChoices>& V,
                                                     const ChoiceModel& cm) {
  std::array<double, kNumChoices> pi{};
  for (int c = 0; c < kNumClasses; ++c) {
    const auto cls = static_cast<ClassLabel>(c);
    const int off = class_offset(cls);
    const int sz = class_size(cls);
    std::span<const double> vs(V.data() + off, sz);
    std::span<double> ps(pi.data() + off, sz);
    if (cm.nested)
      nested_logit_probabilities(vs, cm.mu_r, cm.mu_t, cls, ps);
    else
      logit_probabilities(vs, cm.mu, ps);
  }
  return pi;
}

double class_logsum(std::span<const double> utilities, double mu) {
  if (utilities.empty()) throw ContractViolation("logsum over empty choice set");
  if (mu <= 0.0) throw ContractViolation("logsum requires mu > 0");
  return stable_logsum(utilities, mu);
}

}  // namespace avmarket
