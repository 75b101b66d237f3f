#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <classd/classd.hpp>

namespace classd::cli {

/// Schema or I/O problem in a configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { Steady, Stability, Sweep, Tf, Simulate, Predict, Compare };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

enum class Format { Csv, Json, JsonPrecise };

Format parse_format(const std::string& name);
std::string to_string(Format f);

struct ThresholdSpec {
  bool enabled = false;
  std::string parameter = "c1";
  double lo = 1e5;
  double hi = 4.5e5;
  double tol = 1.0;
};

struct SweepSpec {
  std::string parameter = "c1";
  double lo = 1e5;
  double hi = 4.5e5;
  int points = 30;
};

struct TfSpec {
  double u0 = 0.0;
  double f_lo = 20.0;
  double f_hi = 20000.0;
  int points = 50;
  bool log_spacing = true;
};

struct SimulateSpec {
  long periods = 384;
  int samples_per_period = 32;
  bool trajectory = false;
};

struct CompareSpec {
  double rel_tol = 0.1;
  double abs_tol = 1e-5;
  int harmonics = 4;
  /// Compare |f_n| (default) or the complex coefficients.
  bool complex_metric = false;
};

struct ExperimentConfig {
  AmplifierParams params = AmplifierParams::defaults();
  InputSignal input = InputSignal::constant(0.0);
  Experiment experiment = Experiment::Steady;

  /// Input periods discarded before spectral measurement, and input periods analysed.
  int transient_periods = 20;
  int analysis_periods = 2;
  int n_max = kDefaultHarmonics;
  /// Reserved; every computation is deterministic.
  long seed = 0;
  int jobs = 1;

  std::vector<double> steady_u0{-0.8, 0.0, 0.8};
  std::vector<double> stability_u0{0.0};
  ThresholdSpec threshold;
  SweepSpec sweep;
  TfSpec tf;
  SimulateSpec simulate;
  int predict_order = 1;
  CompareSpec compare;

  std::string out_path;
  Format format = Format::Csv;

  /// Throws ConfigError naming the key of the first violated invariant.
  void validate() const;
};

/// Parses YAML text. Unknown keys, wrong types and invalid values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Deterministic rendering of the effective configuration (after overrides).
std::string canonical_text(const ExperimentConfig& config);

/// SHA-256 of canonical_text, lowercase hex.
std::string config_hash(const ExperimentConfig& config);

}  // namespace classd::cli
