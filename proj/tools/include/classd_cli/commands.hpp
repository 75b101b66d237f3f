#pragma once

#include <functional>

#include "classd_cli/config.hpp"
#include "classd_cli/output.hpp"

namespace classd::cli {

Document run_steady(const ExperimentConfig& config);
Document run_stability(const ExperimentConfig& config);
/// One row per grid point in grid order; a failing point fills the `error` column.
Document run_sweep(const ExperimentConfig& config);
Document run_tf(const ExperimentConfig& config);
Document run_simulate(const ExperimentConfig& config);
Document run_predict(const ExperimentConfig& config);

struct CompareResult {
  Document doc;
  /// Every tracked row is within compare.rel_tol * |analytic| + compare.abs_tol.
  bool within_tolerance = true;
};

/// Analytic prediction against simulation plus harmonic analysis, per harmonic.
CompareResult run_compare(const ExperimentConfig& config);

/// Dispatches on config.experiment. `within_tolerance` is false only for a compare
/// that exceeded its tolerances.
Document run_experiment(const ExperimentConfig& config, bool* within_tolerance = nullptr);

/// Runs body(i) for i in [0, count) on at most `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace classd::cli
