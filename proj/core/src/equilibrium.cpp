#include "avmarket/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "avmarket/choice.hpp"
#include "avmarket/errors.hpp"
#include "avmarket/kinematics.hpp"

namespace avmarket {

SupplyResult supply_from_choices(const std::array<double, kNumChoices>& probabilities,
                                 const std::array<double, kNumClasses>& populations,
                                 double prepurchased_Ns) {
  double Nr = 0.0;
  for (int i = 0; i < kNumChoices; ++i) {
    if (kChoices[i].rental == RentalChoice::R)
      Nr += populations[static_cast<int>(kChoices[i].cls)] * probabilities[i];
  }
  return {Nr, prepurchased_Ns + Nr};
}

DemandResult demand_from_choices(const std::array<double, kNumChoices>& probabilities,
                                 const std::array<double, kNumClasses>& populations,
                                 double window_h) {
  double o = 0.0, a = 0.0, m = 0.0, p = 0.0;
  for (int i = 0; i < kNumChoices; ++i) {
    const double trips = populations[static_cast<int>(kChoices[i].cls)] * probabilities[i];
    switch (kChoices[i].travel) {
      case TravelMode::O: o += trips; break;
      case TravelMode::A: a += trips; break;
      case TravelMode::M: m += trips; break;
      case TravelMode::P: p += trips; break;
      case TravelMode::None: break;
    }
  }
  // Crowdsourced rides run on AVs, so they count toward AV road trips.
  return {o / window_h, (a + o) / window_h, m / window_h, p / window_h};
}

double service_rate(double fleet_N, double q_o, double window_h) {
  if (fleet_N <= 0.0) return 0.0;
  return q_o * window_h / fleet_N;
}

double idle_time(double fleet_N, double q_o_floored, double t_p, double t_r) {
  return fleet_N / q_o_floored - t_p - t_r;
}

bool crowdsourcing_available(const ExperimentConfig& config, const PeriodSpec& period) {
  if (config.econ.prepurchased_Ns > 0.0) return true;
  for (int c = 0; c < kNumClasses; ++c) {
    if (owns_av(static_cast<ClassLabel>(c)) && period.populations[c] > 0.0) return true;
  }
  return false;
}

namespace {

// Everything phi needs, with the choice scale swappable for continuation.
struct PhiContext {
  const ExperimentConfig* config;
  const PeriodSpec* period;
  PricePoint price;
  ChoiceModel cm;
  bool available;
};

PhiEval phi_eval(const PhiVector& x, const PhiContext& ctx) {
  const auto& city = ctx.config->city;
  const auto& econ = ctx.config->econ;
  const double h = ctx.period->decision_window_h;
  const double floor = ctx.config->solver.demand_floor;

  EquilibriumState s;
  s.trip_time_tr = x[0];
  s.rides_per_vehicle_n0 = x[1];
  s.pickup_time_tp = x[2];
  s.customer_wait_wc = x[3];

  const UtilityInputs in{x[0], x[2], x[3], x[1]};
  s.utilities = assemble_utilities(in, ctx.price, econ, ctx.available);
  s.probabilities = choice_probabilities(s.utilities, ctx.cm);

  const SupplyResult sup =
      supply_from_choices(s.probabilities, ctx.period->populations, econ.prepurchased_Ns);
  s.rented_Nr = sup.rented_Nr;
  s.fleet_N = sup.fleet_N;

  const DemandResult dem = demand_from_choices(s.probabilities, ctx.period->populations, h);
  s.demand_qo = dem.q_o;
  s.demand_qa = dem.q_a;
  s.demand_qm = dem.q_m;
  s.demand_qp = dem.q_p;

  if (!ctx.available) {
    // No fleet can form, so the service-side variables collapse and only the
    // manual/transit congestion loop remains.
    s.vehicle_idle_wt = 0.0;
    const double tr_only = trip_time(s.demand_qm, s.demand_qa, s.demand_qo, 0.0, city);
    return {{tr_only, 0.0, 0.0, 0.0}, s};
  }

  const double n0_new = service_rate(s.fleet_N, s.demand_qo, h);
  const double qe = std::max(s.demand_qo, floor);
  s.vehicle_idle_wt = idle_time(s.fleet_N, qe, x[2], x[0]);

  const double tr_new = trip_time(s.demand_qm, s.demand_qa, s.demand_qo, s.vehicle_idle_wt, city);
  const double tp_new = pickup_time(s.vehicle_idle_wt, s.demand_qo, tr_new, city);
  const double wc_new = customer_wait(qe, s.vehicle_idle_wt, city);

  return {{tr_new, n0_new, tp_new, wc_new}, s};
}

double gap_inf(const PhiVector& a, const PhiVector& b) {
  double g = 0.0;
  for (int i = 0; i < 4; ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

bool all_finite(const PhiVector& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// Iterates live in this box; the cap only binds on wild transients.
constexpr double kStateCap = 1e3;

PhiVector clamp_box(const PhiVector& x) {
  PhiVector y;
  for (int i = 0; i < 4; ++i) y[i] = std::clamp(x[i], 0.0, kStateCap);
  return y;
}

struct NewtonOutcome {
  PhiVector x;
  double gap = 0.0;
  int steps = 0;
  bool converged = false;
};

// Line-searched Newton on g(x) = Phi(x) - x with a finite-difference Jacobian;
// bails out after repeated line-search stalls (wrong basin of the merit norm).
NewtonOutcome newton_phase(PhiVector x, const PhiContext& ctx, double tol, int budget) {
  NewtonOutcome out;
  int stall = 0;
  for (int k = 0; k < budget; ++k) {
    const PhiVector fx = phi_eval(x, ctx).next;
    Eigen::Vector4d g;
    for (int i = 0; i < 4; ++i) g(i) = fx[i] - x[i];
    out.x = x;
    out.gap = g.cwiseAbs().maxCoeff();
    out.steps = k + 1;
    if (out.gap <= tol) {
      out.converged = true;
      return out;
    }
    Eigen::Matrix4d J;
    for (int j = 0; j < 4; ++j) {
      const double hj = 1e-7 * std::max(1.0, std::abs(x[j]));
      PhiVector xp = x, xm = x;
      xp[j] += hj;
      xm[j] -= hj;
      const PhiVector fp = phi_eval(xp, ctx).next;
      const PhiVector fm = phi_eval(xm, ctx).next;
      for (int i = 0; i < 4; ++i)
        J(i, j) = ((fp[i] - xp[i]) - (fm[i] - xm[i])) / (2.0 * hj);
    }
    Eigen::Vector4d dx = J.partialPivLu().solve(-g);
    if (!dx.allFinite()) dx = g;
    const double n0 = g.norm();
    double t = 1.0;
    bool accepted = false;
    PhiVector xt = x;
    for (int ls = 0; ls < 30; ++ls) {
      PhiVector cand;
      for (int i = 0; i < 4; ++i) cand[i] = x[i] + t * dx(i);
      cand = clamp_box(cand);
      const PhiVector fc = phi_eval(cand, ctx).next;
      double nc = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double d = fc[i] - cand[i];
        nc += d * d;
      }
      if (std::sqrt(nc) <= (1.0 - 1e-4 * t) * n0) {
        accepted = true;
        xt = cand;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || t < 1e-6) {
      if (++stall >= 3) return out;
    } else {
      stall = 0;
    }
    if (accepted) x = xt;
  }
  return out;
}

struct HybridOutcome {
  PhiVector x;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Staged solve: damped Picard, then Newton from ordered seeds, then
// continuation on the logit scale from an easier (smoother) problem.
HybridOutcome hybrid_solve(const PhiContext& ctx, const SolverSettings& st, int depth) {
  HybridOutcome out;
  PhiVector x{ctx.config->city.congestion_base_a, 1.0, 0.05, 0.05};
  double best_gap = std::numeric_limits<double>::infinity();
  PhiVector best_x = x;
  std::vector<PhiVector> ring;
  ring.reserve(16);
  std::size_t ring_pos = 0;

  const int picard_budget = std::min(300, st.max_iterations);
  while (out.iterations < picard_budget) {
    const PhiVector fx = phi_eval(x, ctx).next;
    ++out.iterations;
    const double gap = gap_inf(fx, x);
    out.trace.push_back(gap);
    if (gap < best_gap) {
      best_gap = gap;
      best_x = x;
    }
    if (gap <= st.residual_tolerance) {
      out.x = x;
      out.gap = gap;
      out.converged = true;
      return out;
    }
    PhiVector next;
    for (int i = 0; i < 4; ++i) next[i] = (1.0 - st.lambda_fp) * x[i] + st.lambda_fp * fx[i];
    x = clamp_box(next);
    if (!all_finite(x)) throw ContractViolation("equilibrium iterate left the finite domain");
    if (ring.size() < 16)
      ring.push_back(x);
    else
      ring[ring_pos++ % 16] = x;
  }

  PhiVector avg = x;
  if (!ring.empty()) {
    avg = {0.0, 0.0, 0.0, 0.0};
    for (const auto& r : ring)
      for (int i = 0; i < 4; ++i) avg[i] += r[i];
    for (int i = 0; i < 4; ++i) avg[i] /= static_cast<double>(ring.size());
  }

  const double a = ctx.config->city.congestion_base_a;
  const PhiVector seeds[] = {
      best_x,
      avg,
      {a + 0.05, 1.7, 0.03, 0.5},   // congested regimes, spread over w_c
      {a + 0.05, 1.7, 0.04, 1.0},
      {a + 0.05, 1.7, 0.06, 2.0},
      {a + 0.01, 1.0, 0.003, 0.005},  // uncongested regime
  };
  out.x = best_x;
  out.gap = best_gap;
  for (const auto& seed : seeds) {
    if (out.iterations >= st.max_iterations) break;
    const int budget = std::min(60, st.max_iterations - out.iterations);
    const NewtonOutcome n = newton_phase(seed, ctx, st.residual_tolerance, budget);
    out.iterations += n.steps;
    out.trace.push_back(n.gap);
    if (n.converged) {
      out.x = n.x;
      out.gap = n.gap;
      out.converged = true;
      return out;
    }
    if (n.gap < out.gap) {
      out.x = n.x;
      out.gap = n.gap;
    }
  }

  if (depth == 0) {
    // The low-mu problem is contractive; track its root back to the target scale.
    const ChoiceModel target = ctx.cm;
    for (int nstep : {4, 8}) {
      if (out.iterations >= st.max_iterations) break;
      PhiContext easy = ctx;
      easy.cm.mu = target.mu / nstep;
      easy.cm.mu_r = target.mu_r / nstep;
      easy.cm.mu_t = target.mu_t / nstep;
      SolverSettings sub = st;
      sub.max_iterations = std::max(1000, st.max_iterations - out.iterations);
      HybridOutcome base = hybrid_solve(easy, sub, depth + 1);
      out.iterations += base.iterations;
      if (!base.converged) continue;
      PhiVector xw = base.x;
      bool ok = true;
      for (int k = 2; k <= nstep && ok; ++k) {
        PhiContext stepctx = ctx;
        stepctx.cm.mu = target.mu * k / nstep;
        stepctx.cm.mu_r = target.mu_r * k / nstep;
        stepctx.cm.mu_t = target.mu_t * k / nstep;
        const NewtonOutcome n = newton_phase(xw, stepctx, st.residual_tolerance, 60);
        out.iterations += n.steps;
        xw = n.x;
        ok = n.converged;
      }
      if (ok) {
        out.x = xw;
        out.gap = gap_inf(phi_eval(xw, ctx).next, xw);
        out.trace.push_back(out.gap);
        out.converged = out.gap <= st.residual_tolerance;
        if (out.converged) return out;
      }
    }
  }
  return out;
}

}  // namespace

PhiEval phi_map(const PhiVector& current, const PricePoint& price,
                const ExperimentConfig& config, const PeriodSpec& period) {
  const PhiContext ctx{&config, &period, price, config.choice_model,
                       crowdsourcing_available(config, period)};
  return phi_eval(current, ctx);
}

SolveResult solve_equilibrium(const PricePoint& price, const ExperimentConfig& config,
                              const PeriodSpec& period, const SolverSettings& settings) {
  if (price.fare_Fo < 0.0 || price.payment_p < 0.0)
    throw ContractViolation("prices must be nonnegative");
  const PhiContext ctx{&config, &period, price, config.choice_model,
                       crowdsourcing_available(config, period)};
  HybridOutcome h = hybrid_solve(ctx, settings, 0);
  if (!h.converged) {
    throw NonConvergenceError(
        "equilibrium solver exhausted its budget (residual " + std::to_string(h.gap) + ")",
        std::move(h.trace));
  }
  PhiEval eval = phi_eval(h.x, ctx);
  SolveResult result;
  result.state = eval.state;
  result.state.trip_time_tr = h.x[0];
  result.state.rides_per_vehicle_n0 = h.x[1];
  result.state.pickup_time_tp = h.x[2];
  result.state.customer_wait_wc = h.x[3];
  result.iterations = h.iterations;
  result.residual = h.gap;
  return result;
}

}  // namespace avmarket
