#include "classd_cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

namespace classd::cli {
namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(join(where, key) + ": unknown key");
  }
}

template <typename T>
T read(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key + ": wrong type");
  }
}

template <typename T>
void read_if(const YAML::Node& parent, const std::string& where, const char* key, T& out) {
  if (const auto n = parent[key]) out = read<T>(n, join(where, key));
}

std::vector<double> read_list(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return {read<double>(node, key)};
  if (!node.IsSequence()) throw ConfigError(key + ": expected a number or a list");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(read<double>(v, key));
  return out;
}

void parse_params(const YAML::Node& node, ExperimentConfig& cfg) {
  std::set<std::string> allowed{"k"};
  for (auto name : kSweepableParams) allowed.emplace(name);
  check_keys(node, "params", allowed);
  int k = 0;
  read_if(node, "params", "k", k);
  if (k != 0 && k != 1) throw ConfigError("params.k: must be 0 or 1");
  cfg.params = AmplifierParams::defaults(k);
  for (auto name : kSweepableParams) {
    const std::string key(name);
    if (const auto n = node[key]) cfg.params.set(name, read<double>(n, "params." + key));
  }
}

Tone parse_tone(const YAML::Node& node, const std::string& where) {
  check_keys(node, where, {"amplitude", "frequency", "phase"});
  Tone t;
  if (!node["amplitude"] || !node["frequency"]) {
    throw ConfigError(where + ": amplitude and frequency are required");
  }
  read_if(node, where, "amplitude", t.amplitude);
  read_if(node, where, "frequency", t.frequency);
  read_if(node, where, "phase", t.phase);
  return t;
}

void parse_input(const YAML::Node& node, ExperimentConfig& cfg) {
  check_keys(node, "input", {"kind", "u0", "amplitude", "frequency", "phase", "tones"});
  std::string kind = "constant";
  read_if(node, "input", "kind", kind);
  double u0 = 0.0;
  read_if(node, "input", "u0", u0);
  if (kind == "constant") {
    for (const char* k : {"amplitude", "frequency", "phase", "tones"}) {
      if (node[k]) throw ConfigError(std::string("input.") + k + ": not used by a constant input");
    }
    cfg.input = InputSignal::constant(u0);
  } else if (kind == "sine") {
    if (node["tones"]) throw ConfigError("input.tones: not used by a sine input");
    if (!node["amplitude"] || !node["frequency"]) {
      throw ConfigError("input: amplitude and frequency are required for a sine input");
    }
    Tone t;
    read_if(node, "input", "amplitude", t.amplitude);
    read_if(node, "input", "frequency", t.frequency);
    read_if(node, "input", "phase", t.phase);
    if (u0 != 0.0) {
      cfg.input = InputSignal::sum_of_sines({t}, u0);
    } else {
      cfg.input = InputSignal::sine(t.amplitude, t.frequency, t.phase);
    }
  } else if (kind == "sum_of_sines") {
    for (const char* k : {"amplitude", "frequency", "phase"}) {
      if (node[k]) throw ConfigError(std::string("input.") + k + ": use input.tones for sum_of_sines");
    }
    const auto tones = node["tones"];
    if (!tones || !tones.IsSequence() || tones.size() == 0) {
      throw ConfigError("input.tones: a non-empty list is required");
    }
    std::vector<Tone> list;
    for (std::size_t i = 0; i < tones.size(); ++i) {
      list.push_back(parse_tone(tones[i], "input.tones[" + std::to_string(i) + "]"));
    }
    cfg.input = InputSignal::sum_of_sines(std::move(list), u0);
  } else {
    throw ConfigError("input.kind: expected constant, sine or sum_of_sines, got '" + kind + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
  if (name == "steady") return Experiment::Steady;
  if (name == "stability") return Experiment::Stability;
  if (name == "sweep") return Experiment::Sweep;
  if (name == "tf") return Experiment::Tf;
  if (name == "simulate") return Experiment::Simulate;
  if (name == "predict") return Experiment::Predict;
  if (name == "compare") return Experiment::Compare;
  throw ConfigError("experiment: unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Steady: return "steady";
    case Experiment::Stability: return "stability";
    case Experiment::Sweep: return "sweep";
    case Experiment::Tf: return "tf";
    case Experiment::Simulate: return "simulate";
    case Experiment::Predict: return "predict";
    case Experiment::Compare: return "compare";
  }
  return "?";
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "json-precise") return Format::JsonPrecise;
  throw ConfigError("output.format: expected csv, json or json-precise, got '" + name + "'");
}

std::string to_string(Format f) {
  switch (f) {
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::JsonPrecise: return "json-precise";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  try {
    params.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  try {
    input.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("input: ") + e.what());
  }
  for (const auto& t : input.tones()) {
    if (!(t.frequency > 0.0)) throw ConfigError("input.frequency: must be positive");
  }
  if (transient_periods < 0) throw ConfigError("analysis.transient_periods: must be >= 0");
  if (analysis_periods < 1) throw ConfigError("analysis.analysis_periods: must be >= 1");
  if (n_max < 1) throw ConfigError("analysis.n_max: must be >= 1");
  if (jobs < 1) throw ConfigError("jobs: must be >= 1");
  for (double u : steady_u0) {
    if (!(std::abs(u) < 1.0)) throw ConfigError("steady.u0: each value must satisfy |u0| < 1");
  }
  for (double u : stability_u0) {
    if (!(std::abs(u) < 1.0)) throw ConfigError("stability.u0: each value must satisfy |u0| < 1");
  }
  if (threshold.enabled) {
    if (!AmplifierParams::is_sweepable(threshold.parameter)) {
      throw ConfigError("stability.threshold.parameter: unknown parameter '" + threshold.parameter + "'");
    }
    if (!(threshold.lo < threshold.hi)) throw ConfigError("stability.threshold.lo: must be below hi");
    if (!(threshold.tol > 0.0)) throw ConfigError("stability.threshold.tol: must be positive");
  }
  if (!AmplifierParams::is_sweepable(sweep.parameter)) {
    throw ConfigError("sweep.parameter: unknown parameter '" + sweep.parameter + "'");
  }
  if (!(sweep.lo < sweep.hi)) throw ConfigError("sweep.lo: must be below sweep.hi");
  if (sweep.points < 2) throw ConfigError("sweep.points: must be >= 2");
  if (!(std::abs(tf.u0) < 1.0)) throw ConfigError("tf.u0: must satisfy |u0| < 1");
  if (!(tf.f_lo > 0.0 && tf.f_lo < tf.f_hi)) throw ConfigError("tf.f_lo: need 0 < f_lo < f_hi");
  if (tf.points < 2) throw ConfigError("tf.points: must be >= 2");
  if (simulate.periods < 1) throw ConfigError("simulate.periods: must be >= 1");
  if (simulate.samples_per_period < 1) throw ConfigError("simulate.samples_per_period: must be >= 1");
  if (predict_order != 0 && predict_order != 1) throw ConfigError("predict.order: must be 0 or 1");
  if (!(compare.rel_tol >= 0.0)) throw ConfigError("compare.rel_tol: must be >= 0");
  if (!(compare.abs_tol >= 0.0)) throw ConfigError("compare.abs_tol: must be >= 0");
  if (compare.harmonics < 1) throw ConfigError("compare.harmonics: must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("yaml: ") + e.what());
  }
  ExperimentConfig cfg;
  if (!root || root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  check_keys(root, "", {"params", "input", "experiment", "analysis", "steady", "stability", "sweep", "tf",
                        "simulate", "predict", "compare", "output", "jobs"});
  if (const auto n = root["params"]) parse_params(n, cfg);
  if (const auto n = root["input"]) parse_input(n, cfg);
  if (const auto n = root["experiment"]) cfg.experiment = parse_experiment(read<std::string>(n, "experiment"));
  read_if(root, "", "jobs", cfg.jobs);

  if (const auto n = root["analysis"]) {
    check_keys(n, "analysis", {"transient_periods", "analysis_periods", "n_max", "seed"});
    read_if(n, "analysis", "transient_periods", cfg.transient_periods);
    read_if(n, "analysis", "analysis_periods", cfg.analysis_periods);
    read_if(n, "analysis", "n_max", cfg.n_max);
    read_if(n, "analysis", "seed", cfg.seed);
  }
  if (const auto n = root["steady"]) {
    check_keys(n, "steady", {"u0"});
    if (n["u0"]) cfg.steady_u0 = read_list(n["u0"], "steady.u0");
  }
  if (const auto n = root["stability"]) {
    check_keys(n, "stability", {"u0", "threshold"});
    if (n["u0"]) cfg.stability_u0 = read_list(n["u0"], "stability.u0");
    if (const auto t = n["threshold"]) {
      check_keys(t, "stability.threshold", {"parameter", "lo", "hi", "tol"});
      cfg.threshold.enabled = true;
      read_if(t, "stability.threshold", "parameter", cfg.threshold.parameter);
      read_if(t, "stability.threshold", "lo", cfg.threshold.lo);
      read_if(t, "stability.threshold", "hi", cfg.threshold.hi);
      read_if(t, "stability.threshold", "tol", cfg.threshold.tol);
    }
  }
  if (const auto n = root["sweep"]) {
    check_keys(n, "sweep", {"parameter", "lo", "hi", "points"});
    read_if(n, "sweep", "parameter", cfg.sweep.parameter);
    read_if(n, "sweep", "lo", cfg.sweep.lo);
    read_if(n, "sweep", "hi", cfg.sweep.hi);
    read_if(n, "sweep", "points", cfg.sweep.points);
  }
  if (const auto n = root["tf"]) {
    check_keys(n, "tf", {"u0", "f_lo", "f_hi", "points", "spacing"});
    read_if(n, "tf", "u0", cfg.tf.u0);
    read_if(n, "tf", "f_lo", cfg.tf.f_lo);
    read_if(n, "tf", "f_hi", cfg.tf.f_hi);
    read_if(n, "tf", "points", cfg.tf.points);
    std::string spacing = "log";
    read_if(n, "tf", "spacing", spacing);
    if (spacing != "log" && spacing != "linear") throw ConfigError("tf.spacing: expected log or linear");
    cfg.tf.log_spacing = spacing == "log";
  }
  if (const auto n = root["simulate"]) {
    check_keys(n, "simulate", {"periods", "samples_per_period", "trajectory"});
    read_if(n, "simulate", "periods", cfg.simulate.periods);
    read_if(n, "simulate", "samples_per_period", cfg.simulate.samples_per_period);
    read_if(n, "simulate", "trajectory", cfg.simulate.trajectory);
  }
  if (const auto n = root["predict"]) {
    check_keys(n, "predict", {"order"});
    read_if(n, "predict", "order", cfg.predict_order);
  }
  if (const auto n = root["compare"]) {
    check_keys(n, "compare", {"rel_tol", "abs_tol", "harmonics", "metric"});
    std::string metric = "magnitude";
    read_if(n, "compare", "metric", metric);
    if (metric != "magnitude" && metric != "complex") {
      throw ConfigError("compare.metric: expected magnitude or complex");
    }
    cfg.compare.complex_metric = metric == "complex";
    read_if(n, "compare", "rel_tol", cfg.compare.rel_tol);
    read_if(n, "compare", "abs_tol", cfg.compare.abs_tol);
    read_if(n, "compare", "harmonics", cfg.compare.harmonics);
  }
  if (const auto n = root["output"]) {
    check_keys(n, "output", {"path", "format"});
    read_if(n, "output", "path", cfg.out_path);
    if (n["format"]) cfg.format = parse_format(read<std::string>(n["format"], "output.format"));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "experiment=" << to_string(c.experiment) << "\n";
  for (auto name : kSweepableParams) o << "params." << name << "=" << fmt(c.params.get(name)) << "\n";
  o << "params.k=" << c.params.k << "\n";
  o << "input.offset=" << fmt(c.input.offset()) << "\n";
  for (const auto& t : c.input.tones()) {
    o << "input.tone=" << fmt(t.amplitude) << "," << fmt(t.frequency) << "," << fmt(t.phase) << "\n";
  }
  o << "analysis=" << c.transient_periods << "," << c.analysis_periods << "," << c.n_max << "," << c.seed
    << "\n";
  auto list = [&](const char* key, const std::vector<double>& v) {
    o << key << "=";
    for (std::size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << fmt(v[i]);
    o << "\n";
  };
  list("steady.u0", c.steady_u0);
  list("stability.u0", c.stability_u0);
  if (c.threshold.enabled) {
    o << "stability.threshold=" << c.threshold.parameter << "," << fmt(c.threshold.lo) << ","
      << fmt(c.threshold.hi) << "," << fmt(c.threshold.tol) << "\n";
  }
  o << "sweep=" << c.sweep.parameter << "," << fmt(c.sweep.lo) << "," << fmt(c.sweep.hi) << ","
    << c.sweep.points << "\n";
  o << "tf=" << fmt(c.tf.u0) << "," << fmt(c.tf.f_lo) << "," << fmt(c.tf.f_hi) << "," << c.tf.points << ","
    << (c.tf.log_spacing ? "log" : "linear") << "\n";
  o << "simulate=" << c.simulate.periods << "," << c.simulate.samples_per_period << ","
    << c.simulate.trajectory << "\n";
  o << "predict.order=" << c.predict_order << "\n";
  o << "compare=" << fmt(c.compare.rel_tol) << "," << fmt(c.compare.abs_tol) << "," << c.compare.harmonics
    << "," << (c.compare.complex_metric ? "complex" : "magnitude") << "\n";
  return o.str();
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = canonical_text(config);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace classd::cli
