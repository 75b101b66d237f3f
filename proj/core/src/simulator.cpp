#include "classd/simulator.hpp"

#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "classd/error.hpp"

namespace classd {
namespace {

constexpr int kMaxRefineIterations = 400;
constexpr double kTruncationBound = 1e-10;

SegmentForcing segment_forcing(const AmplifierParams& p, const InputSignal& input, double t0,
                               double g, double v_start) {
  SegmentForcing f;
  f.level = g + p.k * v_start;
  f.ramp = p.k * 2.0 / p.T;
  for (int d = 0; d <= kInputDerivatives; ++d) f.input[d] = input.derivative(d, t0);
  return f;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double carrier(double t, double period) {
  const double n = std::floor(t / period);
  return -1.0 + 2.0 * (t - n * period) / period;
}

long PulseTrain::skipped_count() const {
  long count = 0;
  for (const auto& e : events) count += e.skipped ? 1 : 0;
  return count;
}

double find_crossing(const std::function<double(double)>& h, double lo, double hi, double tol,
                     int scan_points, int* sign_changes) {
  if (!(hi > lo) || scan_points < 1 || !(tol > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "find_crossing needs lo < hi, tol > 0, scan >= 1");
  }
  const double step = (hi - lo) / scan_points;
  double prev_t = lo;
  double prev_h = h(lo);
  if (prev_h == 0.0) {
    if (sign_changes) *sign_changes = 1;
    return lo;
  }
  int changes = 0;
  double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
  for (int i = 1; i <= scan_points; ++i) {
    const double t = i == scan_points ? hi : lo + i * step;
    const double ht = h(t);
    if (ht == 0.0 || sign_of(ht) != sign_of(prev_h)) {
      if (changes == 0) {
        a = prev_t;
        fa = prev_h;
        b = t;
        fb = ht;
      }
      ++changes;
    }
    if (ht != 0.0) prev_h = ht;
    prev_t = t;
  }
  if (sign_changes) *sign_changes = changes;
  if (changes == 0) {
    throw Error(ErrorKind::NoCrossing, "no sign change on the scan grid");
  }
  if (fb == 0.0) return b;

  // Illinois regula falsi, with a bisection whenever the bracket fails to halve.
  int side = 0;
  double checkpoint = b - a;
  for (int it = 1; it <= kMaxRefineIterations; ++it) {
    if (b - a <= tol) return 0.5 * (a + b);
    double c = (a * fb - b * fa) / (fb - fa);
    const bool stalled = it % 4 == 0 && (b - a) > 0.5 * checkpoint;
    if (it % 4 == 0) checkpoint = b - a;
    if (stalled || !(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = h(c);
    if (fc == 0.0) return c;
    if (sign_of(fc) == sign_of(fa)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  throw Error(ErrorKind::ToleranceFailure, "crossing bracket did not shrink to tolerance");
}

SimulationResult simulate(const Model& model, const InputSignal& input, const StateVector& x0,
                          double t0, long n_periods, const SimulationOptions& options) {
  const auto& p = model.params();
  const double period = p.T;
  const double n0_real = t0 / period;
  const long n0 = std::lround(n0_real);
  if (std::abs(n0_real - n0) > 1e-9 * std::max(1.0, std::abs(n0_real))) {
    throw Error(ErrorKind::InvalidParameter, "t0 must lie on a carrier edge n0*T");
  }
  if (n_periods < 1) {
    throw Error(ErrorKind::InvalidParameter, "n_periods must be >= 1");
  }
  input.validate();

  SimulationResult result;
  result.train.period = period;
  result.train.t_start = n0 * period;
  result.train.t_end = (n0 + n_periods) * period;
  result.train.events.reserve(n_periods);
  if (options.samples_per_period > 0) {
    result.trajectory.reserve(n_periods * options.samples_per_period);
  }

  const double tol = options.crossing_tol * period;
  const RowVector5 gamma = model.gamma();
  const double u5_bound = input.derivative_bound(kInputDerivatives + 1);
  const double p6_norm = model.p_vec(kInputDerivatives + 2, period).norm();

  StateVector x = x0;
  for (long n = n0; n < n0 + n_periods; ++n) {
    const double tn = n * period;
    if (u5_bound * p6_norm > kTruncationBound * x.norm()) ++result.truncation_warnings;

    const SegmentPropagator high(model, x, segment_forcing(p, input, tn, 1.0, -1.0));
    auto h = [&](double s) { return high.output(s) + 1.0 - 2.0 * s / period; };

    PulseEvent ev;
    ev.n = n;
    double s_switch = 0.0;
    bool switched = true;
    if (h(0.0) <= 0.0) {
      ev.skipped = true;
      ev.a = 0.0;
    } else {
      int changes = 0;
      try {
        s_switch = find_crossing(h, 0.0, period, tol, options.scan_points, &changes);
        ev.a = s_switch / period;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoCrossing) throw;
        ev.skipped = true;
        ev.a = 1.0;
        s_switch = period;
        switched = false;
      }
      if (changes > 1) {
        if (result.multiple_crossings == 0) {
          spdlog::warn("multiple comparator crossings in carrier period {}; using the first", n);
        }
        ++result.multiple_crossings;
      }
    }
    ev.A = tn + ev.a * period;
    result.train.events.push_back(ev);

    const double v_switch = -1.0 + 2.0 * s_switch / period;
    const StateVector x_switch = switched && s_switch > 0.0 ? high.state(s_switch) : x;
    const SegmentPropagator low(model, switched ? x_switch : x,
                                segment_forcing(p, input, tn + s_switch, -1.0, v_switch));

    for (int j = 0; j < options.samples_per_period; ++j) {
      const double s = period * j / options.samples_per_period;
      TrajectorySample sample;
      sample.t = tn + s;
      if (s < s_switch) {
        sample.x = high.state(s);
        sample.g = 1.0;
      } else {
        sample.x = low.state(s - s_switch);
        sample.g = -1.0;
      }
      sample.m = gamma * sample.x;
      result.trajectory.push_back(sample);
    }

    x = switched ? low.state(period - s_switch) : high.state(period);
  }
  if (result.truncation_warnings > 0) {
    spdlog::warn("input series truncation estimate above {} in {} periods", kTruncationBound,
                 result.truncation_warnings);
  }
  if (result.multiple_crossings > 1) {
    spdlog::warn("{} periods had multiple crossings", result.multiple_crossings);
  }
  result.x_end = x;
  return result;
}

MapState discrete_map_step(const Model& model, const InputSignal& input, long n,
                           const StateVector& x_at_An, double a_n) {
  if (!(a_n > 0.0 && a_n < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "discrete map needs a_n in (0, 1)");
  }
  const auto& p = model.params();
  const double period = p.T;
  const double k = p.k;
  const double t_an = (n + a_n) * period;
  const double d1 = (1.0 - a_n) * period;

  std::array<double, kInputDerivatives + 1> u{};
  for (int j = 0; j <= kInputDerivatives; ++j) u[j] = input.derivative(j, t_an);

  // Forcing of the low segment (A_n, (n+1)T), carried to the carrier edge.
  const StateVector low = ((-1.0 + k * (-1.0 + 2.0 * a_n)) * model.q_vec(1, d1) +
                           (2.0 * k / period) * model.q_vec(2, d1)) /
                          p.lc();
  const RowVector5 gamma = model.gamma();

  auto state_at = [&](double a) {
    const double d2 = a * period;
    const double d = d1 + d2;
    StateVector x = model.matrix_exp(d) * x_at_An + model.matrix_exp(d2) * low +
                    ((1.0 - k) * model.q_vec(1, d2) + (2.0 * k / period) * model.q_vec(2, d2)) /
                        p.lc();
    for (int j = 0; j <= kInputDerivatives; ++j) x += model.p_vec(j + 1, d) * u[j];
    return x;
  };
  auto f = [&](double a) { return (gamma * state_at(a))(0) + 1.0 - 2.0 * a; };

  MapState out;
  try {
    out.a = find_crossing(f, 0.0, 1.0, 1e-12);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCrossing) throw;
    throw Error(ErrorKind::NoCrossing,
                "discrete map: no duty cycle in (0, 1) at period " + std::to_string(n + 1));
  }
  if (!(out.a > 0.0 && out.a < 1.0) || f(0.0) <= 0.0) {
    throw Error(ErrorKind::NoCrossing,
                "discrete map: saturated duty cycle at period " + std::to_string(n + 1));
  }
  out.x = state_at(out.a);
  return out;
}

}  // namespace classd
