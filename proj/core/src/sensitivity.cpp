#include "avmarket/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "avmarket/choice.hpp"
#include "avmarket/equilibrium.hpp"
#include "avmarket/errors.hpp"
#include "avmarket/kinematics.hpp"
#include "avmarket/objectives.hpp"

namespace avmarket {

namespace {
constexpr double kFleetGuard = 1e-9;  // keeps the service-rate ratio defined with no fleet
}

Eigen::VectorXd pack_state(const EquilibriumState& s) {
  Eigen::VectorXd t(tau::kDim);
  t(tau::kTr) = s.trip_time_tr;
  t(tau::kTp) = s.pickup_time_tp;
  t(tau::kWc) = s.customer_wait_wc;
  t(tau::kWt) = s.vehicle_idle_wt;
  t(tau::kN0) = s.rides_per_vehicle_n0;
  t(tau::kN) = s.fleet_N;
  t(tau::kNr) = s.rented_Nr;
  t(tau::kQo) = s.demand_qo;
  t(tau::kQa) = s.demand_qa;
  t(tau::kQm) = s.demand_qm;
  t(tau::kQp) = s.demand_qp;
  for (int i = 0; i < kNumChoices; ++i) {
    t(tau::kV + i) = s.utilities[i];
    t(tau::kPi + i) = s.probabilities[i];
  }
  return t;
}

EquilibriumState unpack_state(const Eigen::VectorXd& t) {
  EquilibriumState s;
  s.trip_time_tr = t(tau::kTr);
  s.pickup_time_tp = t(tau::kTp);
  s.customer_wait_wc = t(tau::kWc);
  s.vehicle_idle_wt = t(tau::kWt);
  s.rides_per_vehicle_n0 = t(tau::kN0);
  s.fleet_N = t(tau::kN);
  s.rented_Nr = t(tau::kNr);
  s.demand_qo = t(tau::kQo);
  s.demand_qa = t(tau::kQa);
  s.demand_qm = t(tau::kQm);
  s.demand_qp = t(tau::kQp);
  for (int i = 0; i < kNumChoices; ++i) {
    s.utilities[i] = t(tau::kV + i);
    s.probabilities[i] = t(tau::kPi + i);
  }
  return s;
}

Eigen::VectorXd residual_vector(const Eigen::VectorXd& t, const PricePoint& price,
                                const ExperimentConfig& config, const PeriodSpec& period) {
  const auto& city = config.city;
  const auto& econ = config.econ;
  const double h = period.decision_window_h;
  const bool avail = crowdsourcing_available(config, period);
  Eigen::VectorXd f(res::kDim);

  const UtilityInputs in{t(tau::kTr), t(tau::kTp), t(tau::kWc), t(tau::kN0)};
  const auto U = assemble_utilities(in, price, econ, avail);
  for (int i = 0; i < kNumChoices; ++i) f(res::kU + i) = t(tau::kV + i) - U[i];

  std::array<double, kNumChoices> V;
  for (int i = 0; i < kNumChoices; ++i) V[i] = t(tau::kV + i);
  const auto pi = choice_probabilities(V, config.choice_model);
  for (int i = 0; i < kNumChoices; ++i) f(res::kPi + i) = t(tau::kPi + i) - pi[i];

  double sum_R = 0.0, sum_O = 0.0, sum_A = 0.0, sum_M = 0.0, sum_P = 0.0;
  for (int i = 0; i < kNumChoices; ++i) {
    const double w = period.populations[static_cast<int>(kChoices[i].cls)] * t(tau::kPi + i);
    if (kChoices[i].rental == RentalChoice::R) sum_R += w;
    switch (kChoices[i].travel) {
      case TravelMode::O: sum_O += w; break;
      case TravelMode::A: sum_A += w; break;
      case TravelMode::M: sum_M += w; break;
      case TravelMode::P: sum_P += w; break;
      case TravelMode::None: break;
    }
  }
  const double N = t(tau::kN), Nr = t(tau::kNr), n0 = t(tau::kN0);
  const double qo = t(tau::kQo), qa = t(tau::kQa), qm = t(tau::kQm), qp = t(tau::kQp);
  const double qe = std::max(qo, config.solver.demand_floor);
  const double Ng = std::max(N, kFleetGuard);
  f(res::kN + 0) = N - econ.prepurchased_Ns - Nr;
  f(res::kN + 1) = Nr - sum_R;
  f(res::kN + 2) = qo * h - sum_O;
  f(res::kN + 3) = qa * h - qo * h - sum_A;
  f(res::kN + 4) = qm * h - sum_M;
  f(res::kN + 5) = qp * h - sum_P;
  const double wt = t(tau::kWt);
  f(res::kT + 0) = t(tau::kTr) - trip_time(qm, qa, qo, wt, city);
  if (avail) {
    f(res::kN + 6) = n0 - qo * h / Ng;
    f(res::kN + 7) = wt - N / qe + t(tau::kTp) + t(tau::kTr);
    f(res::kT + 1) = t(tau::kTp) - pickup_time(wt, qo, t(tau::kTr), city);
    f(res::kT + 2) = t(tau::kWc) - customer_wait(qe, wt, city);
  } else {
    // Service variables are pinned at zero when no fleet can form.
    f(res::kN + 6) = n0;
    f(res::kN + 7) = wt;
    f(res::kT + 1) = t(tau::kTp);
    f(res::kT + 2) = t(tau::kWc);
  }
  return f;
}

Eigen::MatrixXd probability_jacobian(const std::array<double, kNumChoices>& V,
                                     const ChoiceModel& cm) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(kNumChoices, kNumChoices);
  if (!cm.nested) {
    const auto pi = choice_probabilities(V, cm);
    for (int c = 0; c < kNumClasses; ++c) {
      const int off = kClassOffset[c], end = kClassOffset[c + 1];
      for (int i = off; i < end; ++i)
        for (int j = off; j < end; ++j)
          D(i, j) = (i == j) ? cm.mu * pi[i] * (1.0 - pi[i]) : -cm.mu * pi[i] * pi[j];
    }
    return D;
  }
  // Nested model: central differences of the probability map.
  const double step = 1e-7;
  for (int j = 0; j < kNumChoices; ++j) {
    auto Vp = V, Vm = V;
    Vp[j] += step;
    Vm[j] -= step;
    const auto pp = choice_probabilities(Vp, cm);
    const auto pm = choice_probabilities(Vm, cm);
    for (int i = 0; i < kNumChoices; ++i) D(i, j) = (pp[i] - pm[i]) / (2.0 * step);
  }
  return D;
}

JacobianBundle residual_jacobian(const EquilibriumState& state, const PricePoint& price,
                                 const ExperimentConfig& config, const PeriodSpec& period) {
  const auto& city = config.city;
  const auto& econ = config.econ;
  const double h = period.decision_window_h;
  const bool avail = crowdsourcing_available(config, period);

  const Eigen::VectorXd t = pack_state(state);
  {
    const double r = residual_vector(t, price, config, period).cwiseAbs().maxCoeff();
    if (r > 1e-8)
      throw ContractViolation("residual_jacobian requires a converged state (residual " +
                              std::to_string(r) + ")");
  }

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(res::kDim, tau::kDim);
  Eigen::MatrixXd Jt = Eigen::MatrixXd::Zero(res::kDim, 2);

  // f_u rows: V_i minus the utility formula, linear in (tr, tp, wc, n0, F, p).
  for (int i = 0; i < kNumChoices; ++i) {
    const int row = res::kU + i;
    J(row, tau::kV + i) = 1.0;
    switch (kChoices[i].travel) {
      case TravelMode::O:
        if (avail) {
          J(row, tau::kTr) = econ.beta_A;
          J(row, tau::kTp) = econ.gamma;
          J(row, tau::kWc) = econ.gamma;
          Jt(row, 0) = 1.0;
        }
        break;
      case TravelMode::A:
        J(row, tau::kTr) = econ.beta_A;
        break;
      case TravelMode::M:
        J(row, tau::kTr) = econ.beta_M;
        break;
      case TravelMode::P:
      case TravelMode::None:
        break;
    }
    if (kChoices[i].rental == RentalChoice::R) {
      J(row, tau::kN0) = -price.payment_p;
      Jt(row, 1) = -state.rides_per_vehicle_n0;
    }
  }

  // f_pi rows: pi_i minus the choice model.
  const Eigen::MatrixXd D = probability_jacobian(state.utilities, config.choice_model);
  for (int i = 0; i < kNumChoices; ++i) {
    J(res::kPi + i, tau::kPi + i) = 1.0;
    for (int j = 0; j < kNumChoices; ++j) J(res::kPi + i, tau::kV + j) -= D(i, j);
  }

  // f_n rows: aggregation, service rate, idle time.
  for (int i = 0; i < kNumChoices; ++i) {
    const double d = period.populations[static_cast<int>(kChoices[i].cls)];
    if (kChoices[i].rental == RentalChoice::R) J(res::kN + 1, tau::kPi + i) = -d;
    switch (kChoices[i].travel) {
      case TravelMode::O: J(res::kN + 2, tau::kPi + i) = -d; break;
      case TravelMode::A: J(res::kN + 3, tau::kPi + i) = -d; break;
      case TravelMode::M: J(res::kN + 4, tau::kPi + i) = -d; break;
      case TravelMode::P: J(res::kN + 5, tau::kPi + i) = -d; break;
      case TravelMode::None: break;
    }
  }
  J(res::kN + 0, tau::kN) = 1.0;
  J(res::kN + 0, tau::kNr) = -1.0;
  J(res::kN + 1, tau::kNr) = 1.0;
  J(res::kN + 2, tau::kQo) = h;
  J(res::kN + 3, tau::kQa) = h;
  J(res::kN + 3, tau::kQo) = -h;
  J(res::kN + 4, tau::kQm) = h;
  J(res::kN + 5, tau::kQp) = h;

  const double qo = state.demand_qo, qa = state.demand_qa, qm = state.demand_qm;
  const double qe = std::max(qo, config.solver.demand_floor);
  const bool qo_active = qo > config.solver.demand_floor;
  const double N = state.fleet_N;
  const double Ng = std::max(N, kFleetGuard);
  J(res::kN + 6, tau::kN0) = 1.0;
  J(res::kN + 7, tau::kWt) = 1.0;
  if (avail) {
    J(res::kN + 6, tau::kQo) = -h / Ng;
    J(res::kN + 6, tau::kN) = (N > kFleetGuard) ? qo * h / (Ng * Ng) : 0.0;
    J(res::kN + 7, tau::kN) = -1.0 / qe;
    J(res::kN + 7, tau::kQo) = qo_active ? N / (qe * qe) : 0.0;
    J(res::kN + 7, tau::kTp) = 1.0;
    J(res::kN + 7, tau::kTr) = 1.0;
  }

  // f_t rows: chain rule through the smoothed kinematics.
  const double wt = state.vehicle_idle_wt;
  const double alpha = city.av_occupation_alpha;
  const double theta = city.theta();
  const SmoothedPower x2 = xi2(city);
  const double u = wt * qo;
  const double xi2v = x2.eval(u);
  const double xi2d = x2.deriv(u);
  const double X = effective_flow(qm, qa, qo, wt, city);
  const double dTdX = 2.0 * city.congestion_coeff_b * X;
  J(res::kT + 0, tau::kTr) = 1.0;
  J(res::kT + 0, tau::kQm) = -dTdX;
  J(res::kT + 0, tau::kQa) = -dTdX * alpha;
  J(res::kT + 0, tau::kQo) = -dTdX * alpha * theta * (xi2v + qo * xi2d * wt);
  J(res::kT + 0, tau::kWt) = -dTdX * alpha * theta * qo * qo * xi2d;

  const double tr = state.trip_time_tr;
  J(res::kT + 1, tau::kTp) = 1.0;
  J(res::kT + 2, tau::kWc) = 1.0;
  if (avail) {
    J(res::kT + 1, tau::kTr) = -theta * xi2v;
    J(res::kT + 1, tau::kQo) = -theta * tr * xi2d * wt;
    J(res::kT + 1, tau::kWt) = -theta * tr * xi2d * qo;

    const SmoothedPower x1 = xi1(city);
    const double kappa =
        (1.0 - city.matching_alpha1 - city.matching_alpha2) / city.matching_alpha2;
    const double K = std::pow(city.matching_A, -1.0 / city.matching_alpha2);
    J(res::kT + 2, tau::kWt) = -K * std::pow(qe, kappa) * x1.deriv(wt);
    J(res::kT + 2, tau::kQo) =
        qo_active ? -K * kappa * std::pow(qe, kappa - 1.0) * x1.eval(wt) : 0.0;
  }

  return {std::move(J), std::move(Jt)};
}

SensitivityResult equilibrium_sensitivity(const JacobianBundle& bundle) {
  SensitivityResult out;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bundle.J_tau);
  out.rcond = lu.rcond();
  if (!(out.rcond > 1e-12)) {
    out.regular = false;
    return out;
  }
  out.S = lu.solve(-bundle.J_theta);
  const double rel = (bundle.J_tau * out.S + bundle.J_theta).norm() / bundle.J_theta.norm();
  out.regular = rel <= 1e-10;
  return out;
}

namespace {

double period_objective_value(ScenarioKind kind, double lambda, const EquilibriumState& state,
                              const PricePoint& price, const ExperimentConfig& config,
                              const PeriodSpec& period) {
  const double R = operating_profit(state, price, period.decision_window_h);
  switch (kind) {
    case ScenarioKind::monopoly: return R;
    case ScenarioKind::first_best: return period_welfare(state, price, config, period);
    case ScenarioKind::second_best:
      return period_welfare(state, price, config, period) + lambda * R;
  }
  throw ContractViolation("unknown scenario");
}

PeriodGradient fd_gradient(ScenarioKind kind, double lambda, const PricePoint& price,
                           const ExperimentConfig& config, const PeriodSpec& period) {
  SolverSettings tight = config.solver;
  tight.residual_tolerance = std::min(tight.residual_tolerance, 1e-11);
  PeriodGradient g;
  g.via_fd = true;
  const double comp[2] = {price.fare_Fo, price.payment_p};
  double out[2];
  for (int j = 0; j < 2; ++j) {
    const double step = 1e-4 * std::max(1.0, std::abs(comp[j]));
    PricePoint hi = price, lo = price;
    (j == 0 ? hi.fare_Fo : hi.payment_p) += step;
    (j == 0 ? lo.fare_Fo : lo.payment_p) -= step;
    const SolveResult rh = solve_equilibrium(hi, config, period, tight);
    const SolveResult rl = solve_equilibrium(lo, config, period, tight);
    out[j] = (period_objective_value(kind, lambda, rh.state, hi, config, period) -
              period_objective_value(kind, lambda, rl.state, lo, config, period)) /
             (2.0 * step);
  }
  g.d_fare = out[0];
  g.d_payment = out[1];
  return g;
}

}  // namespace

PeriodGradient objective_gradient(ScenarioKind kind, double lambda,
                                  const EquilibriumState& state, const PricePoint& price,
                                  const ExperimentConfig& config, const PeriodSpec& period) {
  const JacobianBundle bundle = residual_jacobian(state, price, config, period);
  const SensitivityResult sens = equilibrium_sensitivity(bundle);
  if (!sens.regular) return fd_gradient(kind, lambda, price, config, period);

  const double h = period.decision_window_h;
  const double F = price.fare_Fo, p = price.payment_p;
  const double qo = state.demand_qo, Nr = state.rented_Nr, n0 = state.rides_per_vehicle_n0;

  // Operating profit: explicit partials plus dependence through tau.
  Eigen::RowVectorXd dR_dtau = Eigen::RowVectorXd::Zero(tau::kDim);
  dR_dtau(tau::kQo) = F * h;
  dR_dtau(tau::kNr) = -p * n0;
  dR_dtau(tau::kN0) = -Nr * p;
  const Eigen::RowVector2d dR_explicit(qo * h, -Nr * n0);
  const Eigen::RowVector2d dR = dR_explicit + dR_dtau * sens.S;

  if (kind == ScenarioKind::monopoly) return {dR(0), dR(1), false};

  // Welfare adds the population-weighted logsum, whose V-gradient is d * pi.
  Eigen::RowVectorXd dW_dtau = dR_dtau;
  for (int i = 0; i < kNumChoices; ++i) {
    dW_dtau(tau::kV + i) +=
        period.populations[static_cast<int>(kChoices[i].cls)] * state.probabilities[i];
  }
  const Eigen::RowVector2d dW = dR_explicit + dW_dtau * sens.S;
  if (kind == ScenarioKind::first_best) return {dW(0), dW(1), false};
  return {dW(0) + lambda * dR(0), dW(1) + lambda * dR(1), false};
}

}  // namespace avmarket
