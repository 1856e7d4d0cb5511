#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace avmarket {

// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Equilibrium solver exhausted its iteration budget (CLI exit code 3).
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), residual_trace(std::move(trace)) {}
  std::vector<double> residual_trace;
};

// Second-best profit floor exceeds what any pricing can earn (CLI exit code 4).
class InfeasibleFloorError : public std::runtime_error {
public:
  InfeasibleFloorError(const std::string& what, double attainable_profit, double floor)
      : std::runtime_error(what), attainable_profit(attainable_profit), floor(floor) {}
  double attainable_profit;
  double floor;
};

// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace avmarket
