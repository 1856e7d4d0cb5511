#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avmarket/optimizer.hpp"
#include "avmarket/types.hpp"

namespace avmarket {

struct RunArtifacts {
  ScenarioResult result;
  std::vector<std::string> files_written;
};

// Resolves the output directory: AVM_OUTPUT_DIR overrides the config value.
std::string resolve_output_dir(const ExperimentConfig& config);

// Optimizes one scenario and writes equilibrium, summary, and trace CSVs.
RunArtifacts run(const ExperimentConfig& config, const ScenarioSpec& scenario);

// Writes the per-period state table for fixed prices (the `solve` subcommand).
std::string write_solve_csv(const ExperimentConfig& config, const PricingDecision& prices,
                            const std::vector<SolveResult>& solves);

struct SweepRow {
  double value = 0.0;
  ScenarioSpec scenario;
  bool ok = false;
  std::string error;
  ScenarioResult result;  // valid when ok
};

// Grid x scenario runs, parallel up to spec.jobs; every point appears in the
// CSV, failures flagged in the status column.
std::vector<SweepRow> sweep(const ExperimentConfig& config, const SweepSpec& spec);
std::string write_sweep_csv(const ExperimentConfig& config, const SweepSpec& spec,
                            const std::vector<SweepRow>& rows);

// Applies one sweep value to a copy of the config (ConfigError if the
// parameter needs the population model but explicit periods are set).
ExperimentConfig apply_sweep_value(const ExperimentConfig& config, SweepParameter parameter,
                                   double value);

}  // namespace avmarket
