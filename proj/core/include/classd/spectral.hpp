#pragma once

#include <utility>
#include <vector>

#include "classd/simulator.hpp"

namespace classd {

/// Analysis interval [t_start, t_end].
struct Window {
  double t_start = 0.0;
  double t_end = 0.0;
  double width() const { return t_end - t_start; }
};

/// p/q with q > 0, in lowest terms.
struct Rational {
  long num = 0;
  long den = 1;
};

/// Best rational approximation with denominator <= max_den. Throws WindowMisaligned if
/// none is within 1e-12 relative.
Rational rationalize(double x, long max_den = 1000000);

/// Smallest whole number of carrier periods that also holds a whole number of input
/// periods 1/f, given f T rational.
long commensurate_periods(double frequency, double period);

/// Window of `min_input_periods` (or more) input periods that starts on carrier edge
/// `first_period` and is commensurate with both T and 1/f.
Window commensurate_window(double frequency, double period, long first_period,
                           long min_input_periods);

/// (1/W) int_W g(t) e^{-i w t} dt, summed exactly over the rectangular pulses.
/// Throws WindowMisaligned if W is not a whole number of cycles of w, or lies outside
/// the train.
Complex pulse_fourier(const PulseTrain& train, double omega, const Window& window);

/// (1/W) int_W g(t) dt.
double pulse_mean(const PulseTrain& train, const Window& window);

struct SpectralReport {
  double fundamental_freq = 0.0;
  double dc = 0.0;
  /// (n, f_n) for n = 1..n_max.
  std::vector<std::pair<int, Complex>> coefficients;
  double thd = 0.0;
  Window window;
  /// Duty cycles were not periodic with the input over the window.
  bool leakage = false;
};

inline constexpr int kDefaultHarmonics = 20;

SpectralReport harmonic_table(const PulseTrain& train, double frequency, int n_max,
                              const Window& window);

/// sqrt(sum_{n>=2} |f_n|^2) / |f_1|. Throws ZeroFundamental.
double thd(const SpectralReport& report);

/// True when the duty cycles inside the window fail to repeat with the input period
/// (to `tol`), the signature of an incommensurate self-oscillation.
bool detect_leakage(const PulseTrain& train, const Window& window, double frequency,
                    double tol = 1e-6);

}  // namespace classd
