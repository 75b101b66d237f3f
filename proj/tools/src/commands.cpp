#include "classd_cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

namespace classd::cli {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Cell yes_no(bool v) { return std::string(v ? "yes" : "no"); }

void add_spectrum_columns(std::vector<std::string>& cols) {
  for (int j = 1; j <= 5; ++j) {
    cols.push_back("mu" + std::to_string(j) + "_re");
    cols.push_back("mu" + std::to_string(j) + "_im");
  }
}

void add_spectrum_cells(std::vector<Cell>& row, const Spectrum& s) {
  for (const Complex& mu : s) {
    row.emplace_back(mu.real());
    row.emplace_back(mu.imag());
  }
}

void pad(std::vector<Cell>& row, std::size_t width) {
  while (row.size() < width) row.emplace_back(std::monostate{});
}

struct Measurement {
  PulseTrain train;
  SpectralReport report;
  long skipped = 0;
  long multiple_crossings = 0;
  double dc = 0.0;
  bool periodic_input = false;
};

// Simulates from the steady state for u(0), discards the transient, and analyses the
// remaining input periods. Constant inputs count carrier periods instead.
Measurement measure(const AmplifierParams& params, const ExperimentConfig& cfg, int n_max) {
  const Model model(params);
  const double T = params.T;
  const auto ss = solve_steady_state(model, cfg.input.value(0.0));
  const StateVector x0 = state_at_carrier_edge(model, ss);
  Measurement m;
  m.periodic_input = !cfg.input.tones().empty();
  long block = 1;
  double f0 = 0.0;
  if (m.periodic_input) {
    f0 = base_frequency(cfg.input);
    block = commensurate_periods(f0, T);
  }
  const long total = block * (cfg.transient_periods + cfg.analysis_periods);
  const auto res = simulate(model, cfg.input, x0, 0.0, total);
  m.train = res.train;
  m.skipped = res.train.skipped_count();
  m.multiple_crossings = res.multiple_crossings;
  const long first = block * cfg.transient_periods;
  const Window w{first * T, total * T};
  if (m.periodic_input) {
    m.report = harmonic_table(res.train, f0, n_max, w);
    m.dc = m.report.dc;
  } else {
    m.report.window = w;
    m.dc = pulse_mean(res.train, w);
    m.report.dc = m.dc;
  }
  return m;
}

std::vector<double> grid(double lo, double hi, int points, bool log_spacing) {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    const double s = static_cast<double>(i) / (points - 1);
    out[i] = log_spacing ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
  }
  out.back() = hi;
  return out;
}

}  // namespace

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t width = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(count, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < width; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Document run_steady(const ExperimentConfig& cfg) {
  Document doc{standard_metadata(cfg), {}};
  doc.metadata.emplace_back("leakage", "n/a");
  const Model model(cfg.params);
  doc.table.columns = {"u0", "a", "slope", "x1", "x2", "x3", "x4", "x5", "replaced_row"};
  for (double u0 : cfg.steady_u0) {
    const SteadyState ss = solve_steady_state(model, u0);
    std::vector<Cell> row{u0, ss.a, ss.slope};
    for (int i = 0; i < 5; ++i) row.emplace_back(ss.x_at_switch(i));
    row.emplace_back(static_cast<long long>(ss.replaced_row));
    doc.table.rows.push_back(std::move(row));
  }
  return doc;
}

Document run_stability(const ExperimentConfig& cfg) {
  Document doc{standard_metadata(cfg), {}};
  doc.metadata.emplace_back("leakage", "n/a");
  const Model model(cfg.params);
  auto& cols = doc.table.columns;
  cols = {"u0", "kappa", "spectral_radius", "stable"};
  add_spectrum_columns(cols);
  if (cfg.threshold.enabled) cols.push_back(cfg.threshold.parameter + "_threshold");
  std::vector<std::vector<Cell>> rows(cfg.stability_u0.size());
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    const double u0 = cfg.stability_u0[i];
    const StabilityReport r = monodromy(model, u0);
    std::vector<Cell> row{u0, r.kappa, r.spectral_radius, yes_no(r.stable)};
    add_spectrum_cells(row, r.eigenvalues);
    if (cfg.threshold.enabled) {
      row.emplace_back(stability_threshold(cfg.params, u0, cfg.threshold.parameter, cfg.threshold.lo,
                                           cfg.threshold.hi, cfg.threshold.tol));
    }
    rows[i] = std::move(row);
  });
  doc.table.rows = std::move(rows);
  return doc;
}

Document run_sweep(const ExperimentConfig& cfg) {
  Document doc{standard_metadata(cfg), {}};
  doc.metadata.emplace_back("sweep_parameter", cfg.sweep.parameter);
  const double u0 = cfg.input.offset();
  const bool spectral = !cfg.input.tones().empty();
  auto& cols = doc.table.columns;
  cols = {cfg.sweep.parameter, "kappa", "spectral_radius", "stable"};
  add_spectrum_columns(cols);
  cols.insert(cols.end(), {"fundamental_re", "fundamental_im", "thd"});
  for (int n = 2; n <= std::min(cfg.n_max, 4); ++n) cols.push_back("h" + std::to_string(n) + "_abs");
  cols.insert(cols.end(), {"skipped", "leakage", "error"});

  struct Point {
    std::optional<StabilityReport> stability;
    std::optional<Measurement> measured;
    std::string error;
  };
  const auto values = grid(cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.points, false);
  std::vector<Point> points(values.size());
  parallel_for(values.size(), cfg.jobs, [&](std::size_t i) {
    Point& pt = points[i];
    try {
      AmplifierParams p = cfg.params;
      p.set(cfg.sweep.parameter, values[i]);
      pt.stability = monodromy(Model(p), u0);
      if (spectral) pt.measured = measure(p, cfg, cfg.n_max);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  });

  // Eigenvalue paths follow their predecessors across the successful points.
  std::vector<Spectrum> spectra;
  for (const auto& pt : points) {
    if (pt.stability) spectra.push_back(pt.stability->eigenvalues);
  }
  spectra = track_eigenvalues(spectra);

  long leaky = 0;
  std::size_t s = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& pt = points[i];
    std::vector<Cell> row{values[i]};
    if (pt.stability) {
      row.insert(row.end(), {pt.stability->kappa, pt.stability->spectral_radius, yes_no(pt.stability->stable)});
      add_spectrum_cells(row, spectra[s++]);
    }
    pad(row, 14);
    if (pt.measured) {
      const auto& r = pt.measured->report;
      row.insert(row.end(), {r.coefficients[0].second.real(), r.coefficients[0].second.imag(), r.thd});
      for (int n = 2; n <= std::min(cfg.n_max, 4); ++n) row.emplace_back(std::abs(r.coefficients[n - 1].second));
      row.emplace_back(static_cast<long long>(pt.measured->skipped));
      row.emplace_back(yes_no(r.leakage));
      leaky += r.leakage ? 1 : 0;
    }
    pad(row, cols.size() - 1);
    row.emplace_back(pt.error);
    doc.table.rows.push_back(std::move(row));
  }
  doc.metadata.emplace_back("leakage", spectral ? std::to_string(leaky) + " of " + std::to_string(points.size()) + " points" : "n/a");
  return doc;
}

Document run_tf(const ExperimentConfig& cfg) {
  Document doc{standard_metadata(cfg), {}};
  const Model model(cfg.params);
  const TransferFunction tf(model, cfg.tf.u0);
  doc.metadata.emplace_back("tf_u0", format_real(cfg.tf.u0));
  doc.metadata.emplace_back("kappa", format_real(tf.kappa()));
  doc.metadata.emplace_back("leakage", "n/a");
  doc.table.columns = {"frequency", "omega", "tf_re", "tf_im", "tf_abs", "tf_phase", "error"};
  for (double f : grid(cfg.tf.f_lo, cfg.tf.f_hi, cfg.tf.points, cfg.tf.log_spacing)) {
    const double w = kTwoPi * f;
    std::vector<Cell> row{f, w};
    try {
      const Complex v = tf(w);
      row.insert(row.end(), {v.real(), v.imag(), std::abs(v), std::arg(v), std::string()});
    } catch (const Error& e) {
      pad(row, 6);
      row.emplace_back(std::string(e.what()));
    }
    doc.table.rows.push_back(std::move(row));
  }
  return doc;
}

Document run_simulate(const ExperimentConfig& cfg) {
  Document doc{standard_metadata(cfg), {}};
  const Model model(cfg.params);
  const auto ss = solve_steady_state(model, cfg.input.value(0.0));
  SimulationOptions opt;
  if (cfg.simulate.trajectory) opt.samples_per_period = cfg.simulate.samples_per_period;
  const auto res = simulate(model, cfg.input, state_at_carrier_edge(model, ss), 0.0, cfg.simulate.periods, opt);
  doc.metadata.emplace_back("skipped", std::to_string(res.train.skipped_count()));
  doc.metadata.emplace_back("multiple_crossings", std::to_string(res.multiple_crossings));
  doc.metadata.emplace_back("truncation_warnings", std::to_string(res.truncation_warnings));
  doc.metadata.emplace_back("leakage", "n/a");
  if (cfg.simulate.trajectory) {
    doc.table.columns = {"t", "x1", "x2", "x3", "x4", "x5", "m", "g"};
    for (const auto& s : res.trajectory) {
      std::vector<Cell> row{s.t};
      for (int i = 0; i < 5; ++i) row.emplace_back(s.x(i));
      row.emplace_back(s.m);
      row.emplace_back(s.g);
      doc.table.rows.push_back(std::move(row));
    }
  } else {
    doc.table.columns = {"n", "A", "a", "skipped"};
    for (const auto& e : res.train.events) {
      doc.table.rows.push_back({static_cast<long long>(e.n), e.A, e.a, yes_no(e.skipped)});
    }
  }
  return doc;
}

namespace {

// Analytic Fourier coefficients 0..n_max of the audio output.
std::vector<Complex> predicted_coefficients(const ExperimentConfig& cfg, int n_max) {
  if (cfg.input.tones().empty()) return {Complex(cfg.input.offset(), 0.0)};
  const Model model(cfg.params);
  const double f0 = base_frequency(cfg.input);
  PredictionOptions opt;
  opt.order = cfg.predict_order;
  opt.n_harmonics = n_max;
  const auto pred = predict_audio(model, slow_input(cfg.input, f0, cfg.params.T), 1.0 / f0, 0.0, opt);
  std::vector<Complex> out(n_max + 1);
  for (const auto& [n, c] : pred.fourier) out[n] = c;
  return out;
}

}  // namespace

Document run_predict(const ExperimentConfig& cfg) {
  Document doc{standard_metadata(cfg), {}};
  doc.metadata.emplace_back("order", std::to_string(cfg.predict_order));
  doc.metadata.emplace_back("leakage", "n/a");
  doc.table.columns = {"n", "frequency", "re", "im", "abs"};
  const auto coeffs = predicted_coefficients(cfg, cfg.n_max);
  const double f0 = cfg.input.tones().empty() ? 0.0 : base_frequency(cfg.input);
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const Complex c = coeffs[n];
    doc.table.rows.push_back({static_cast<long long>(n), f0 * n, c.real(), c.imag(), std::abs(c)});
  }
  return doc;
}

CompareResult run_compare(const ExperimentConfig& cfg) {
  CompareResult out;
  Document& doc = out.doc;
  doc.metadata = standard_metadata(cfg);
  doc.metadata.emplace_back("rel_tol", format_real(cfg.compare.rel_tol));
  doc.metadata.emplace_back("abs_tol", format_real(cfg.compare.abs_tol));
  doc.metadata.emplace_back("metric", cfg.compare.complex_metric ? "complex" : "magnitude");
  const int harmonics = cfg.input.tones().empty() ? 0 : cfg.compare.harmonics;
  const auto analytic = predicted_coefficients(cfg, harmonics);
  const Measurement m = measure(cfg.params, cfg, std::max(harmonics, 1));
  doc.metadata.emplace_back("leakage", m.periodic_input ? (m.report.leakage ? "yes" : "no") : "n/a");
  doc.metadata.emplace_back("skipped", std::to_string(m.skipped));
  doc.table.columns = {"n",           "analytic_re", "analytic_im", "analytic_abs", "simulated_re",
                       "simulated_im", "simulated_abs", "abs_diff", "rel_diff", "within_tol"};
  for (int n = 0; n <= harmonics; ++n) {
    const Complex a = analytic[n];
    const Complex s = n == 0 ? Complex(m.dc, 0.0) : m.report.coefficients[n - 1].second;
    const double diff = cfg.compare.complex_metric ? std::abs(s - a) : std::abs(std::abs(s) - std::abs(a));
    const bool ok = diff <= cfg.compare.rel_tol * std::abs(a) + cfg.compare.abs_tol;
    out.within_tolerance = out.within_tolerance && ok;
    const Cell rel = std::abs(a) > 0.0 ? Cell(diff / std::abs(a)) : Cell(std::monostate{});
    doc.table.rows.push_back({static_cast<long long>(n), a.real(), a.imag(), std::abs(a), s.real(), s.imag(),
                              std::abs(s), diff, rel, yes_no(ok)});
  }
  doc.metadata.emplace_back("within_tolerance", out.within_tolerance ? "yes" : "no");
  return out;
}

Document run_experiment(const ExperimentConfig& cfg, bool* within_tolerance) {
  if (within_tolerance) *within_tolerance = true;
  switch (cfg.experiment) {
    case Experiment::Steady: return run_steady(cfg);
    case Experiment::Stability: return run_stability(cfg);
    case Experiment::Sweep: return run_sweep(cfg);
    case Experiment::Tf: return run_tf(cfg);
    case Experiment::Simulate: return run_simulate(cfg);
    case Experiment::Predict: return run_predict(cfg);
    case Experiment::Compare: {
      auto r = run_compare(cfg);
      if (within_tolerance) *within_tolerance = r.within_tolerance;
      return std::move(r.doc);
    }
  }
  return {};
}

}  // namespace classd::cli
