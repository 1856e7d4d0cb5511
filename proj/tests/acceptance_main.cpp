// End-to-end acceptance checks; prints one PASS/FAIL line per criterion and
// exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <avmarket/choice.hpp>
#include <avmarket/equilibrium.hpp>
#include <avmarket/kinematics.hpp>
#include <avmarket/objectives.hpp>
#include <avmarket/optimizer.hpp>
#include <avmarket/runner.hpp>
#include <avmarket/sensitivity.hpp>

#include "helpers.hpp"

using namespace avmarket;
namespace fs = std::filesystem;

namespace {

using Detail = std::optional<std::string>;

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

SolveResult tight_solve(const PricePoint& price, const ExperimentConfig& config,
                        const PeriodSpec& period) {
  SolverSettings s = config.solver;
  s.residual_tolerance = 1e-11;
  return solve_equilibrium(price, config, period, s);
}

// --- criterion 1 -----------------------------------------------------------

Detail check_logit_calibration() {
  const double V[] = {0.0, -5.0};
  double out[2];
  logit_probabilities(V, 0.5, out);
  if (std::abs(out[0] - 0.9241) > 5e-4)
    return fmt("probability %.6f is outside 0.9241 +/- 0.0005", out[0]);
  return {};
}

// --- criterion 2 -----------------------------------------------------------

Detail check_equilibrium_residual() {
  ExperimentConfig config;
  const auto periods = config.periods();
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> uni(0.0, 50.0);
  for (int t = 0; t < 10; ++t) {
    const PricePoint price{uni(rng), uni(rng)};
    for (const auto& period : periods) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = solve_equilibrium(price, config, period);
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0).count();
      if (res.residual > 1e-8)
        return fmt("residual %.3g at (%.2f, %.2f)", res.residual, price.fare_Fo,
                   price.payment_p);
      if (res.iterations > config.solver.max_iterations)
        return fmt("%d iterations at (%.2f, %.2f)", res.iterations, price.fare_Fo,
                   price.payment_p);
      if (secs >= 1.0)
        return fmt("solve took %.2f s at (%.2f, %.2f)", secs, price.fare_Fo, price.payment_p);
    }
  }
  return {};
}

// --- criterion 3 -----------------------------------------------------------

Detail check_oracle_equivalence() {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> pop(100.0, 80000.0);
  for (int t = 0; t < 10; ++t) {
    const auto pi = avmtest::random_probabilities(rng);
    std::array<double, kNumClasses> d;
    for (double& x : d) x = pop(rng);
    const double h = t % 2 == 0 ? 1.0 : 0.5;

    const auto sup = supply_from_choices(pi, d, 25.0);
    const double ref_nr = avmtest::oracle_rented(pi, d);
    if (std::abs(sup.rented_Nr - ref_nr) > 1e-10 * std::max(1.0, ref_nr))
      return fmt("fleet mismatch %.3g", sup.rented_Nr - ref_nr);

    const auto dem = demand_from_choices(pi, d, h);
    const auto ref = avmtest::oracle_demand(pi, d, h);
    const double scale = std::max(1.0, ref.q_a);
    if (std::abs(dem.q_o - ref.q_o) > 1e-10 * scale ||
        std::abs(dem.q_a - ref.q_a) > 1e-10 * scale ||
        std::abs(dem.q_m - ref.q_m) > 1e-10 * scale ||
        std::abs(dem.q_p - ref.q_p) > 1e-10 * scale)
      return std::string("demand aggregation mismatch beyond 1e-10");
  }
  return {};
}

// --- criterion 4 -----------------------------------------------------------

Detail check_gradients() {
  ExperimentConfig config;
  const auto periods = config.periods();
  struct Probe {
    ScenarioKind kind;
    double lambda;
  };
  const Probe probes[] = {{ScenarioKind::monopoly, 0.0},
                          {ScenarioKind::first_best, 0.0},
                          {ScenarioKind::second_best, 0.5}};

  auto value_of = [&](const Probe& probe, const EquilibriumState& s, const PricePoint& p,
                      const PeriodSpec& period) {
    const double h = period.decision_window_h;
    switch (probe.kind) {
      case ScenarioKind::monopoly: return operating_profit(s, p, h);
      case ScenarioKind::first_best: return period_welfare(s, p, config, period);
      case ScenarioKind::second_best:
        return period_welfare(s, p, config, period) + probe.lambda * operating_profit(s, p, h);
    }
    return 0.0;
  };

  std::mt19937 rng(314);
  std::uniform_real_distribution<double> uni(5.0, 45.0);
  for (int t = 0; t < 5; ++t) {
    const PricePoint price{uni(rng), uni(rng)};
    for (const auto& probe : probes) {
      for (const auto& period : periods) {
        const auto solved = tight_solve(price, config, period);
        const auto g = objective_gradient(probe.kind, probe.lambda, solved.state, price,
                                          config, period);
        const double step = 1e-4;
        auto at = [&](double df, double dp) {
          const PricePoint p{price.fare_Fo + df, price.payment_p + dp};
          return value_of(probe, tight_solve(p, config, period).state, p, period);
        };
        const double fd_f = (at(step, 0.0) - at(-step, 0.0)) / (2.0 * step);
        const double fd_p = (at(0.0, step) - at(0.0, -step)) / (2.0 * step);
        if (std::abs(g.d_fare - fd_f) > 1e-3 * std::max(1.0, std::abs(fd_f)) ||
            std::abs(g.d_payment - fd_p) > 1e-3 * std::max(1.0, std::abs(fd_p)))
          return fmt("gradient (%.6g, %.6g) vs FD (%.6g, %.6g) at (%.2f, %.2f)", g.d_fare,
                     g.d_payment, fd_f, fd_p, price.fare_Fo, price.payment_p);
      }
    }
  }

  // Probability response keeps every class on its simplex.
  std::uniform_real_distribution<double> util(-40.0, 0.0);
  std::array<double, kNumChoices> V;
  for (double& v : V) v = util(rng);
  ChoiceModel cm{0.1, false, 0.1, 0.1};
  const Eigen::MatrixXd J = probability_jacobian(V, cm);
  for (int i = 0; i < kNumChoices; ++i) {
    if (std::abs(J.row(i).sum()) > 1e-12)
      return fmt("probability jacobian row %d sums to %.3g", i, J.row(i).sum());
  }
  return {};
}

// --- criteria 5 and 7 share the expensive scenario runs --------------------

struct ScenarioRuns {
  ScenarioResult mono, fb, sb;
};

const ScenarioRuns& runs() {
  static const ScenarioRuns r = [] {
    ExperimentConfig config;
    return ScenarioRuns{optimize({ScenarioKind::monopoly, 1.0}, config),
                        optimize({ScenarioKind::first_best, 1.0}, config),
                        optimize({ScenarioKind::second_best, 1.0}, config)};
  }();
  return r;
}

Detail check_scenario_ordering() {
  ExperimentConfig config;
  const double floor = profit_floor(config, 1.0);
  const auto& r = runs();

  if (!(r.fb.operating_profit < floor && floor < r.mono.operating_profit))
    return fmt("floor %.0f does not separate operating profits (%.0f, %.0f)", floor,
               r.fb.operating_profit, r.mono.operating_profit);

  const double wf = r.fb.daily_welfare, ws = r.sb.daily_welfare, wm = r.mono.daily_welfare;
  if (wf < ws - 1e-6 * std::abs(wf))
    return fmt("welfare ordering broken: first-best %.2f < second-best %.2f", wf, ws);
  if (ws < wm - 1e-6 * std::abs(ws))
    return fmt("welfare ordering broken: second-best %.2f < monopoly %.2f", ws, wm);

  const double pm = r.mono.operating_profit, ps = r.sb.operating_profit;
  if (pm < ps - 1e-6 * std::abs(pm))
    return fmt("profit ordering broken: monopoly %.2f < second-best %.2f", pm, ps);
  if (ps < floor - 1e-6 * floor)
    return fmt("second-best operating profit %.2f below floor %.2f", ps, floor);
  if (std::abs(ps - floor) / floor > 1e-3)
    return fmt("floor not binding: operating profit %.2f vs floor %.2f", ps, floor);
  return {};
}

// --- criterion 6 -----------------------------------------------------------

Detail check_nested_reduction() {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> uni(-40.0, 5.0);
  for (int t = 0; t < 20; ++t) {
    std::array<double, kNumChoices> V;
    for (double& v : V) v = uni(rng);
    for (double mu : {0.1, 0.5, 1.0}) {
      ChoiceModel flat{mu, false, mu, mu};
      ChoiceModel nested{mu, true, mu, mu};
      const auto pf = choice_probabilities(V, flat);
      const auto pn = choice_probabilities(V, nested);
      for (int i = 0; i < kNumChoices; ++i)
        if (std::abs(pn[i] - pf[i]) > 1e-12)
          return fmt("choice %d differs by %.3g at mu %.1f", i, pn[i] - pf[i], mu);
    }
  }
  return {};
}

// --- criterion 7 -----------------------------------------------------------

Detail check_directions() {
  ExperimentConfig config;

  // Welfare pricing carries more riders than profit pricing in every period.
  for (std::size_t k = 0; k < 2; ++k) {
    if (runs().fb.states[k].demand_qo <= runs().mono.states[k].demand_qo)
      return fmt("period %zu: first-best trips %.0f not above monopoly %.0f", k,
                 runs().fb.states[k].demand_qo, runs().mono.states[k].demand_qo);
  }

  // More AVs on the street cannot hurt the platform.
  double prev = -1e18;
  for (double pen : {0.05, 0.1, 0.2, 0.4}) {
    auto c = apply_sweep_value(config, SweepParameter::av_penetration, pen);
    const double profit = optimize({ScenarioKind::monopoly, 1.0}, c).daily_profit;
    if (profit < prev - 1e-6 * std::abs(prev))
      return fmt("monopoly profit fell from %.0f to %.0f as penetration rose to %.2f", prev,
                 profit, pen);
    prev = profit;
  }

  // A higher sharing cost shrinks supply and profit.
  prev = 1e18;
  for (double m : {10.0, 20.0, 30.0}) {
    auto c = apply_sweep_value(config, SweepParameter::m, m);
    const double profit = optimize({ScenarioKind::monopoly, 1.0}, c).daily_profit;
    if (profit > prev + 1e-6 * std::abs(prev))
      return fmt("monopoly profit rose from %.0f to %.0f as sharing cost rose to %.0f", prev,
                 profit, m);
    prev = profit;
  }

  // Sharper choices narrow the gap between welfare and profit pricing.
  auto sharp = apply_sweep_value(config, SweepParameter::mu, 0.5);
  const double adv_01 = runs().fb.daily_welfare - runs().mono.daily_welfare;
  const double adv_05 = optimize({ScenarioKind::first_best, 1.0}, sharp).daily_welfare -
                        optimize({ScenarioKind::monopoly, 1.0}, sharp).daily_welfare;
  if (!(adv_05 < adv_01))
    return fmt("welfare advantage grew from %.0f to %.0f as mu rose", adv_01, adv_05);
  return {};
}

// --- criterion 8 -----------------------------------------------------------

Detail check_smoothing() {
  CityParams city;
  for (SmoothedPower f : {xi1(city), xi2(city)}) {
    const double eps = f.epsilon;
    const double lo = eps * (1.0 - 1e-12), hi = eps * (1.0 + 1e-12);
    if (std::abs(f.eval(hi) - f.eval(lo)) > 1e-9 * std::abs(f.eval(eps)))
      return fmt("value jump %.3g at the threshold", f.eval(hi) - f.eval(lo));
    if (std::abs(f.deriv(hi) - f.deriv(lo)) > 1e-6 * std::abs(f.deriv(eps)))
      return fmt("derivative jump %.3g at the threshold", f.deriv(hi) - f.deriv(lo));
    for (int k = 0; k < 20; ++k) {
      const double x = eps * std::pow(10.0, -2.0 + 4.0 * k / 19.0);
      const double step = 1e-5 * std::max(x, eps);
      const double fd = (f.eval(x + step) - f.eval(x - step)) / (2.0 * step);
      if (std::abs(f.deriv(x) - fd) > 1e-6 * std::max(1e-12, std::abs(fd)))
        return fmt("derivative %.6g vs FD %.6g at x=%.3g", f.deriv(x), fd, x);
    }
  }

  // Congested trip time inherits the seam smoothness through xi2.
  const double qm = 1e5, qa = 1.5e5, qo = 5e4;
  const double seam = city.xi2_epsilon / qo;
  const auto x2 = xi2(city);
  auto slope = [&](double wt) {
    const double flow = effective_flow(qm, qa, qo, wt, city);
    return 2.0 * city.congestion_coeff_b * flow * city.av_occupation_alpha * qo * qo *
           city.theta() * x2.deriv(wt * qo);
  };
  const double lo = seam * (1.0 - 1e-12), hi = seam * (1.0 + 1e-12);
  if (std::abs(trip_time(qm, qa, qo, hi, city) - trip_time(qm, qa, qo, lo, city)) > 1e-9)
    return std::string("trip time jumps at the smoothing threshold");
  if (std::abs(slope(hi) - slope(lo)) > 1e-6 * std::abs(slope(seam)))
    return std::string("trip time slope jumps at the smoothing threshold");
  return {};
}

// --- criterion 9 -----------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Detail check_determinism() {
  ExperimentConfig config;
  const fs::path base = fs::temp_directory_path() / "avm_acceptance_det";
  fs::remove_all(base);

  std::vector<std::string> snapshots[2];
  for (int round = 0; round < 2; ++round) {
    const fs::path dir = base / ("round" + std::to_string(round));
    setenv("AVM_OUTPUT_DIR", dir.c_str(), 1);
    const auto art = run(config, {ScenarioKind::monopoly, 1.0});
    for (const auto& f : art.files_written) snapshots[round].push_back(slurp(f));

    SweepSpec spec;
    spec.parameter = SweepParameter::m;
    spec.values = {18.0, 22.0};
    spec.scenarios = {{ScenarioKind::monopoly, 1.0}};
    const auto rows = sweep(config, spec);
    snapshots[round].push_back(slurp(write_sweep_csv(config, spec, rows)));
  }
  unsetenv("AVM_OUTPUT_DIR");
  fs::remove_all(base);

  if (snapshots[0].size() != snapshots[1].size())
    return std::string("run artifact counts differ");
  for (std::size_t i = 0; i < snapshots[0].size(); ++i) {
    if (snapshots[0][i].empty()) return fmt("artifact %zu is empty", i);
    if (snapshots[0][i] != snapshots[1][i]) return fmt("artifact %zu differs between runs", i);
  }
  return {};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Detail()> check;
  };
  const Criterion criteria[] = {
      {"logit calibration point", check_logit_calibration},
      {"equilibrium residual on random prices", check_equilibrium_residual},
      {"supply/demand oracle equivalence", check_oracle_equivalence},
      {"objective gradient correctness", check_gradients},
      {"scenario ordering and binding floor", check_scenario_ordering},
      {"nested logit reduction", check_nested_reduction},
      {"direction-of-effect suite", check_directions},
      {"smoothing correctness", check_smoothing},
      {"output determinism", check_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Detail detail;
    try {
      detail = c.check();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail) {
      ++failures;
      std::printf("FAIL  %s — %s\n", c.name, detail->c_str());
    } else {
      std::printf("PASS  %s\n", c.name);
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
