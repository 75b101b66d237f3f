#include "classd/spectral.hpp"

#include <cmath>
#include <numeric>
#include <numbers>
#include <string>

#include "classd/error.hpp"

namespace classd {
namespace {

constexpr double kAlignTol = 1e-9;

void check_window(const PulseTrain& train, const Window& window) {
  const double slack = kAlignTol * train.period;
  if (!(window.t_end > window.t_start) || window.t_start < train.t_start - slack ||
      window.t_end > train.t_end + slack) {
    throw Error(ErrorKind::WindowMisaligned, "window lies outside the pulse train");
  }
}

// Sum over the +1 and -1 pieces of g clipped to the window.
template <typename F>
Complex accumulate_pieces(const PulseTrain& train, const Window& window, F&& integral) {
  Complex sum = 0.0;
  for (const auto& ev : train.events) {
    const double t0 = ev.n * train.period;
    const double t1 = t0 + train.period;
    if (t1 <= window.t_start || t0 >= window.t_end) continue;
    const double a = std::max(t0, window.t_start);
    const double m = std::clamp(ev.A, a, std::min(t1, window.t_end));
    const double b = std::min(t1, window.t_end);
    sum += integral(a, m) - integral(m, b);
  }
  return sum;
}

}  // namespace

Rational rationalize(double x, long max_den) {
  // Continued fraction convergents.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int i = 0; i < 64; ++i) {
    const double fl = std::floor(r);
    const long a = static_cast<long>(fl);
    const long h2 = a * h1 + h0;
    const long k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / k1 - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
      return {h1, k1};
    }
    if (r - fl == 0.0) break;
    r = 1.0 / (r - fl);
  }
  throw Error(ErrorKind::WindowMisaligned,
              "no rational form for f*T = " + std::to_string(x) + " (input not commensurate)");
}

long commensurate_periods(double frequency, double period) {
  if (!(frequency > 0.0 && period > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "frequency and period must be positive");
  }
  // f T = p/q: q carrier periods hold p input periods.
  return rationalize(frequency * period).den;
}

Window commensurate_window(double frequency, double period, long first_period,
                           long min_input_periods) {
  const Rational r = rationalize(frequency * period);
  const long blocks = std::max(1L, (min_input_periods + r.num - 1) / r.num);
  Window w;
  w.t_start = first_period * period;
  w.t_end = (first_period + blocks * r.den) * period;
  return w;
}

Complex pulse_fourier(const PulseTrain& train, double omega, const Window& window) {
  if (omega == 0.0) {
    throw Error(ErrorKind::InvalidParameter, "use pulse_mean for the zero frequency");
  }
  check_window(train, window);
  const double cycles = window.width() * omega / (2.0 * std::numbers::pi);
  if (std::abs(cycles - std::round(cycles)) > kAlignTol * std::max(1.0, std::abs(cycles))) {
    throw Error(ErrorKind::WindowMisaligned,
                "window holds " + std::to_string(cycles) + " cycles, not a whole number");
  }
  const Complex iw(0.0, omega);
  // Phases are taken relative to the window start to keep the exponent small.
  const double t_ref = window.t_start;
  auto integral = [&](double a, double b) {
    return (std::exp(-iw * (b - t_ref)) - std::exp(-iw * (a - t_ref))) / (-iw);
  };
  const Complex phase = std::exp(-iw * t_ref);
  return phase * accumulate_pieces(train, window, integral) / window.width();
}

double pulse_mean(const PulseTrain& train, const Window& window) {
  check_window(train, window);
  auto integral = [](double a, double b) { return Complex(b - a, 0.0); };
  return accumulate_pieces(train, window, integral).real() / window.width();
}

double thd(const SpectralReport& report) {
  double fundamental = 0.0;
  double rest = 0.0;
  for (const auto& [n, c] : report.coefficients) {
    if (n == 1) fundamental = std::abs(c);
    if (n >= 2) rest += std::norm(c);
  }
  if (!(fundamental > 0.0)) {
    throw Error(ErrorKind::ZeroFundamental, "THD undefined without a fundamental");
  }
  return std::sqrt(rest) / fundamental;
}

bool detect_leakage(const PulseTrain& train, const Window& window, double frequency,
                    double tol) {
  const long q = commensurate_periods(frequency, train.period);
  std::vector<double> a;
  for (const auto& ev : train.events) {
    const double t0 = ev.n * train.period;
    if (t0 >= window.t_start - kAlignTol * train.period &&
        t0 + train.period <= window.t_end + kAlignTol * train.period) {
      a.push_back(ev.a);
    }
  }
  for (size_t i = 0; i + q < a.size(); ++i) {
    if (std::abs(a[i + q] - a[i]) > tol) return true;
  }
  return false;
}

SpectralReport harmonic_table(const PulseTrain& train, double frequency, int n_max,
                              const Window& window) {
  if (n_max < 1) {
    throw Error(ErrorKind::InvalidParameter, "n_max must be >= 1");
  }
  SpectralReport r;
  r.fundamental_freq = frequency;
  r.window = window;
  r.dc = pulse_mean(train, window);
  const double w = 2.0 * std::numbers::pi * frequency;
  for (int n = 1; n <= n_max; ++n) r.coefficients.emplace_back(n, pulse_fourier(train, n * w, window));
  r.thd = thd(r);
  r.leakage = detect_leakage(train, window, frequency);
  return r;
}

}  // namespace classd
