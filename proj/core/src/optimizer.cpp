#include "avmarket/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "avmarket/equilibrium.hpp"
#include "avmarket/errors.hpp"
#include "avmarket/objectives.hpp"
#include "avmarket/sensitivity.hpp"

namespace avmarket {

namespace {

constexpr double kMinStep = 1e-7;

double period_value(ScenarioKind kind, double lambda, const EquilibriumState& state,
                    const PricePoint& price, const ExperimentConfig& config,
                    const PeriodSpec& period) {
  const double profit = operating_profit(state, price, period.decision_window_h);
  if (kind == ScenarioKind::monopoly) return profit;
  const double welfare = period_welfare(state, price, config, period);
  if (kind == ScenarioKind::first_best) return welfare;
  return welfare + lambda * profit;
}

PricePoint project(PricePoint p) {
  p.fare_Fo = std::max(p.fare_Fo, 0.0);
  p.payment_p = std::max(p.payment_p, 0.0);
  return p;
}

PricePoint start_point(int i) {
  static constexpr PricePoint kStarts[] = {{5.0, 5.0}, {20.0, 10.0}, {35.0, 20.0}, {10.0, 35.0}};
  if (i < 4) return kStarts[i];
  return {static_cast<double>((7 * i + 3) % 50), static_cast<double>((11 * i + 5) % 50)};
}

struct AscentOutcome {
  PricePoint price;
  SolveResult solve;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;  // gradient condition met
  bool usable = false;     // at least the start point solved
  std::vector<TraceRow> trace;
};

// Projected gradient ascent from one start; candidate steps whose equilibrium
// fails to converge are treated as rejected and the step is shrunk.
AscentOutcome ascend(ScenarioKind kind, double lambda, const ExperimentConfig& config,
                     const PeriodSpec& period, int period_idx, int start_idx, PricePoint start) {
  const OptimizerSettings& opt = config.optimizer;
  AscentOutcome out;
  PricePoint x = project(start);
  SolveResult sr;
  try {
    sr = solve_equilibrium(x, config, period);
  } catch (const NonConvergenceError&) {
    return out;
  }
  double fx = period_value(kind, lambda, sr.state, x, config, period);
  out.usable = true;
  double last_step = 0.0;
  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    const PeriodGradient g = objective_gradient(kind, lambda, sr.state, x, config, period);
    // Zero out descent components pinned at the boundary.
    const double pgf = (x.fare_Fo <= 0.0 && g.d_fare < 0.0) ? 0.0 : g.d_fare;
    const double pgp = (x.payment_p <= 0.0 && g.d_payment < 0.0) ? 0.0 : g.d_payment;
    const double pgn = std::max(std::abs(pgf), std::abs(pgp));
    out.trace.push_back({period_idx, start_idx, iter, x.fare_Fo, x.payment_p, fx, pgn, last_step});
    if (pgn <= opt.gradient_tolerance * std::max(1.0, std::abs(fx))) {
      out.converged = true;
      break;
    }
    if (iter == opt.max_iterations) break;
    const double df = pgf / pgn;
    const double dp = pgp / pgn;
    bool accepted = false;
    for (double t = opt.initial_step; t >= kMinStep; t *= opt.backtrack_factor) {
      const PricePoint cand = project({x.fare_Fo + t * df, x.payment_p + t * dp});
      SolveResult cs;
      try {
        cs = solve_equilibrium(cand, config, period);
      } catch (const NonConvergenceError&) {
        continue;
      }
      const double fc = period_value(kind, lambda, cs.state, cand, config, period);
      if (fc >= fx + opt.armijo_c * t * pgn) {
        x = cand;
        sr = cs;
        fx = fc;
        last_step = t;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // line search stalled below kMinStep
  }
  out.price = x;
  out.solve = sr;
  out.value = fx;
  return out;
}

struct PeriodSolution {
  PricePoint price;
  SolveResult solve;
  double value = 0.0;
  bool converged = false;
  std::vector<TraceRow> trace;  // all starts
};

PeriodSolution best_of_starts(ScenarioKind kind, double lambda, const ExperimentConfig& config,
                              const PeriodSpec& period, int period_idx,
                              const std::vector<PricePoint>& starts) {
  PeriodSolution sol;
  bool any = false;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<TraceRow> trace;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    AscentOutcome o =
        ascend(kind, lambda, config, period, period_idx, static_cast<int>(s), starts[s]);
    trace.insert(trace.end(), o.trace.begin(), o.trace.end());
    if (!o.usable) continue;
    if (!any || o.value > best) {
      any = true;
      best = o.value;
      sol.price = o.price;
      sol.solve = o.solve;
      sol.value = o.value;
      sol.converged = o.converged;
    }
  }
  if (!any) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "no optimizer start converged for period %d", period_idx);
    throw NonConvergenceError(buf, {});
  }
  sol.trace = std::move(trace);
  return sol;
}

std::vector<PricePoint> default_starts(const ExperimentConfig& config) {
  std::vector<PricePoint> starts;
  const int n = std::max(1, config.optimizer.multistart);
  starts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) starts.push_back(start_point(i));
  return starts;
}

struct CoreResult {
  PricingDecision prices;
  std::vector<EquilibriumState> states;
  std::vector<SolveResult> solves;
  bool optimal = true;
  std::vector<TraceRow> trace;
};

CoreResult optimize_core(ScenarioKind kind, double lambda, const ExperimentConfig& config,
                         const std::vector<PeriodSpec>& periods,
                         const std::vector<PricingDecision>& warm_starts) {
  CoreResult res;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    std::vector<PricePoint> starts;
    if (warm_starts.empty()) {
      starts = default_starts(config);
    } else {
      for (const auto& w : warm_starts) starts.push_back(w[k]);
    }
    PeriodSolution sol =
        best_of_starts(kind, lambda, config, periods[k], static_cast<int>(k), starts);
    res.prices.push_back(sol.price);
    res.states.push_back(sol.solve.state);
    res.solves.push_back(sol.solve);
    res.optimal = res.optimal && sol.converged;
    res.trace.insert(res.trace.end(), sol.trace.begin(), sol.trace.end());
  }
  return res;
}

ScenarioResult package(const ScenarioSpec& scenario, const ExperimentConfig& config,
                       CoreResult core) {
  ScenarioResult r;
  r.scenario = scenario;
  r.prices = std::move(core.prices);
  r.states = std::move(core.states);
  r.solves = std::move(core.solves);
  r.optimal = core.optimal;
  r.trace = std::move(core.trace);
  r.operating_profit = daily_operating_profit(r.prices, r.states, config);
  r.daily_profit = daily_profit(r.prices, r.states, config);
  const ChoiceModel& cm = config.choice_model;
  if (cm.nested || cm.mu > 0.0)
    r.daily_welfare = daily_welfare(r.prices, r.states, config);
  else
    r.daily_welfare = std::numeric_limits<double>::quiet_NaN();
  return r;
}

// Daily aggregates and their price gradients at one price vector.
struct DailyEval {
  PricingDecision prices;
  std::vector<SolveResult> solves;
  double profit = 0.0;   // operating, before fixed costs
  double welfare = 0.0;
  std::vector<double> g_profit;   // d profit / d (F_0, p_0, F_1, p_1, ...)
  std::vector<double> g_welfare;
};

std::optional<DailyEval> try_eval_daily(const ExperimentConfig& config,
                                        const std::vector<PeriodSpec>& periods,
                                        const PricingDecision& prices) {
  DailyEval e;
  e.prices = prices;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    SolveResult sr;
    try {
      sr = solve_equilibrium(prices[k], config, periods[k]);
    } catch (const NonConvergenceError&) {
      return std::nullopt;
    }
    const double w = periods[k].duration_Hk / periods[k].decision_window_h;
    e.profit += w * operating_profit(sr.state, prices[k], periods[k].decision_window_h);
    e.welfare += w * period_welfare(sr.state, prices[k], config, periods[k]);
    const PeriodGradient gp = objective_gradient(ScenarioKind::monopoly, 0.0, sr.state,
                                                 prices[k], config, periods[k]);
    const PeriodGradient gw = objective_gradient(ScenarioKind::first_best, 0.0, sr.state,
                                                 prices[k], config, periods[k]);
    e.g_profit.push_back(w * gp.d_fare);
    e.g_profit.push_back(w * gp.d_payment);
    e.g_welfare.push_back(w * gw.d_fare);
    e.g_welfare.push_back(w * gw.d_payment);
    e.solves.push_back(std::move(sr));
  }
  return e;
}

PricingDecision shift_prices(const PricingDecision& base, const std::vector<double>& dir,
                             double step) {
  PricingDecision out = base;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].fare_Fo = std::max(out[k].fare_Fo + step * dir[2 * k], 0.0);
    out[k].payment_p = std::max(out[k].payment_p + step * dir[2 * k + 1], 0.0);
  }
  return out;
}

// Newton steps along the profit gradient until daily profit hits the target.
bool restore_profit(const ExperimentConfig& config, const std::vector<PeriodSpec>& periods,
                    DailyEval& e, double target, double tol_abs) {
  for (int step = 0; step < 12; ++step) {
    if (std::abs(e.profit - target) <= tol_abs) return true;
    double g2 = 0.0;
    for (double g : e.g_profit) g2 += g * g;
    if (!(g2 > 0.0)) return false;
    const PricingDecision cand =
        shift_prices(e.prices, e.g_profit, (target - e.profit) / g2);
    auto next = try_eval_daily(config, periods, cand);
    if (!next) return false;
    e = std::move(*next);
  }
  return std::abs(e.profit - target) <= tol_abs;
}

// Maximizes welfare on the profit = target surface by alternating tangential
// ascent with Newton restoration. The dual bisection alone cannot pin the
// binding profit tightly: near first-best the profit is a small difference of
// large money flows, so welfare-scale stopping noise swamps it.
struct BindOutcome {
  DailyEval eval;
  bool stationary = false;
};

std::optional<BindOutcome> bind_profit_floor(const ExperimentConfig& config,
                                             const std::vector<PeriodSpec>& periods,
                                             const PricingDecision& seed, double target,
                                             double tol_abs) {
  auto first = try_eval_daily(config, periods, seed);
  if (!first) return std::nullopt;
  BindOutcome out{std::move(*first), false};
  if (!restore_profit(config, periods, out.eval, target, tol_abs)) return std::nullopt;
  const OptimizerSettings& opt = config.optimizer;
  const std::size_t dim = out.eval.g_profit.size();
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    double g2 = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      g2 += out.eval.g_profit[i] * out.eval.g_profit[i];
      dot += out.eval.g_welfare[i] * out.eval.g_profit[i];
    }
    if (!(g2 > 0.0)) break;
    std::vector<double> tangent(dim);
    double tn = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      tangent[i] = out.eval.g_welfare[i] - dot / g2 * out.eval.g_profit[i];
      tn = std::max(tn, std::abs(tangent[i]));
    }
    if (tn <= opt.gradient_tolerance * std::max(1.0, std::abs(out.eval.welfare))) {
      out.stationary = true;
      break;
    }
    for (std::size_t i = 0; i < dim; ++i) tangent[i] /= tn;
    bool accepted = false;
    for (double t = opt.initial_step; t >= kMinStep; t *= opt.backtrack_factor) {
      auto trial = try_eval_daily(config, periods, shift_prices(out.eval.prices, tangent, t));
      if (!trial || !restore_profit(config, periods, *trial, target, tol_abs)) continue;
      if (trial->welfare >= out.eval.welfare + opt.armijo_c * t * tn) {
        out.eval = std::move(*trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return out;
}

ScenarioResult optimize_second_best(const ScenarioSpec& scenario, const ExperimentConfig& config,
                                    const std::vector<PeriodSpec>& periods) {
  const LambdaLoopSettings& loop = config.lambda_loop;
  const double floor = profit_floor(config, scenario.rho);
  const double floor_scale = std::max(std::abs(floor), 1.0);

  CoreResult mono = optimize_core(ScenarioKind::monopoly, 0.0, config, periods, {});
  const double best_profit = daily_operating_profit(mono.prices, mono.states, config);
  if (best_profit < floor - loop.profit_match_rtol * floor_scale) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "profit floor %.6g exceeds best attainable operating profit %.6g", floor,
                  best_profit);
    throw InfeasibleFloorError(buf, best_profit, floor);
  }

  std::vector<LambdaStep> history;
  auto evaluate = [&](double lambda, const std::vector<PricingDecision>& warm) {
    CoreResult c = optimize_core(ScenarioKind::second_best, lambda, config, periods, warm);
    const double profit = daily_operating_profit(c.prices, c.states, config);
    history.push_back({lambda, profit});
    return std::pair<CoreResult, double>(std::move(c), profit);
  };

  auto finish = [&](CoreResult core, double lambda, double profit, bool matched) {
    ScenarioResult r = package(scenario, config, std::move(core));
    r.lambda = lambda;
    r.floor = floor;
    r.constraint_slack = profit - floor;
    r.optimal = r.optimal && matched;
    r.lambda_history = history;
    return r;
  };

  // lambda = 0 is plain welfare maximization; done if it already clears the floor.
  auto [fb, fb_profit] = evaluate(0.0, {});
  if (fb_profit >= floor - loop.profit_match_rtol * floor_scale)
    return finish(std::move(fb), 0.0, fb_profit, true);

  auto [hi_res, hi_profit] = evaluate(loop.lambda_max, {mono.prices});
  if (hi_profit < floor) {
    // The multiplier needed exceeds the cap; the profit-maximizing prices are
    // the closest feasible fallback.
    const double slack = best_profit - floor;
    ScenarioResult r = package(scenario, config, std::move(mono));
    r.lambda = loop.lambda_max;
    r.floor = floor;
    r.constraint_slack = slack;
    r.optimal = false;
    return r;
  }

  double lo = 0.0, hi = loop.lambda_max;
  PricingDecision lo_prices = std::move(fb.prices);
  for (int step = 0; step < loop.max_bisections; ++step) {
    if (std::abs(hi_profit - floor) <= loop.profit_match_rtol * floor_scale) break;
    const double mid = 0.5 * (lo + hi);
    auto [mid_res, mid_profit] = evaluate(mid, {lo_prices, hi_res.prices});
    if (mid_profit >= floor) {
      hi = mid;
      hi_res = std::move(mid_res);
      hi_profit = mid_profit;
    } else {
      lo = mid;
      lo_prices = std::move(mid_res.prices);
    }
  }

  // Land exactly on the binding floor (from the feasible side).
  const double target = floor + 1e-5 * floor_scale;
  const double tol_abs = 1e-6 * floor_scale;
  if (auto bound = bind_profit_floor(config, periods, hi_res.prices, target, tol_abs)) {
    CoreResult refined;
    refined.prices = bound->eval.prices;
    for (const auto& s : bound->eval.solves) refined.states.push_back(s.state);
    refined.solves = std::move(bound->eval.solves);
    refined.optimal = bound->stationary;
    refined.trace = std::move(hi_res.trace);
    const double profit = bound->eval.profit;
    const bool matched = std::abs(profit - floor) <= loop.profit_match_rtol * floor_scale;
    return finish(std::move(refined), hi, profit, matched);
  }
  const bool matched = std::abs(hi_profit - floor) <= loop.profit_match_rtol * floor_scale;
  return finish(std::move(hi_res), hi, hi_profit, matched);
}

}  // namespace

ScenarioResult optimize(const ScenarioSpec& scenario, const ExperimentConfig& config) {
  const auto periods = config.periods();
  if (periods.empty()) throw ConfigError("no periods configured");
  if (scenario.kind == ScenarioKind::second_best)
    return optimize_second_best(scenario, config, periods);
  CoreResult core = optimize_core(scenario.kind, 0.0, config, periods, {});
  return package(scenario, config, std::move(core));
}

}  // namespace avmarket
