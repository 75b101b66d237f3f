#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "classd_cli/commands.hpp"

namespace {

constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitComputation = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace classd;
  using namespace classd::cli;

  CLI::App app{"Class-D amplifier simulation and analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<int> jobs;
  std::optional<int> k;
  std::map<std::string, std::optional<double>> overrides;
  std::string log_level = "warn";

  app.add_option("--config", config_path, "YAML experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "json-precise"}));
  app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--k", k, "Ripple compensation (0 or 1)")->check(CLI::IsMember({0, 1}));
  for (auto name : kSweepableParams) {
    const std::string key(name);
    app.add_option("--" + key, overrides[key], "Override parameter " + key);
  }
  app.add_option("--log-level", log_level, "spdlog level")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  const std::pair<const char*, const char*> subcommands[] = {
      {"steady", "Periodic steady states for constant inputs"},
      {"stability", "Monodromy spectra and optional stability thresholds"},
      {"sweep", "Stability and distortion over a parameter grid"},
      {"tf", "Small-signal transfer function over frequency"},
      {"simulate", "Event-driven time-domain simulation"},
      {"predict", "Analytic audio output harmonics"},
      {"compare", "Analytic prediction against simulation, per harmonic"}};
  for (const auto& [name, help] : subcommands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_default_logger(spdlog::stderr_color_mt("classd"));

  try {
    ExperimentConfig cfg = config_path.empty() ? parse_config("") : load_config(config_path);
    cfg.experiment = parse_experiment(app.get_subcommands().front()->get_name());
    if (k) {
      // Switching k keeps any explicitly configured values.
      cfg.params.k = *k;
    }
    for (const auto& [name, value] : overrides) {
      if (value) cfg.params.set(name, *value);
    }
    if (jobs) cfg.jobs = *jobs;
    if (!out_path.empty()) cfg.out_path = out_path;
    if (!format.empty()) cfg.format = parse_format(format);
    cfg.validate();

    bool within = true;
    const Document doc = run_experiment(cfg, &within);
    write_output(doc, cfg.out_path, cfg.format);
    if (!within) {
      std::cerr << "compare: tolerance exceeded\n";
      return kExitTolerance;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const classd::Error& e) {
    std::cerr << "computation error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}
