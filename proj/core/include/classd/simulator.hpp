#pragma once

#include <functional>
#include <vector>

#include "classd/input_signal.hpp"
#include "classd/propagation.hpp"

namespace classd {

/// One carrier period [nT, (n+1)T] and its falling edge.
struct PulseEvent {
  long n = 0;
  double A = 0.0;  // falling-edge time (s)
  double a = 0.0;  // duty cycle (A - nT)/T
  bool skipped = false;
};

struct PulseTrain {
  double period = 0.0;
  std::vector<PulseEvent> events;
  double t_start = 0.0;
  double t_end = 0.0;

  /// Number of saturated (skipped) periods.
  long skipped_count() const;
};

struct TrajectorySample {
  double t = 0.0;
  StateVector x = StateVector::Zero();
  double m = 0.0;
  double g = 0.0;
};

struct SimulationOptions {
  /// Sub-grid for locating the first sign change of m - v in a period.
  int scan_points = 64;
  /// Crossing tolerance in units of T.
  double crossing_tol = 1e-12;
  /// Trajectory samples per carrier period; 0 disables sampling.
  int samples_per_period = 0;
};

struct SimulationResult {
  PulseTrain train;
  std::vector<TrajectorySample> trajectory;
  StateVector x_end = StateVector::Zero();
  /// Periods where the input series truncation estimate exceeded its bound.
  long truncation_warnings = 0;
  /// Periods with more than one sign change of m - v on the scan grid.
  long multiple_crossings = 0;
};

/// Event-driven simulation from x0 at t0 = n0 T over n_periods carrier periods.
SimulationResult simulate(const Model& model, const InputSignal& input, const StateVector& x0,
                          double t0, long n_periods, const SimulationOptions& options = {});

/// First root of h on [lo, hi]: scan on `scan_points` intervals, then a bracketed
/// Illinois refinement to `tol`. Throws NoCrossing when no sign change is seen, and
/// ToleranceFailure if the bracket cannot be refined. `sign_changes` receives the
/// number of sign changes seen on the scan grid.
double find_crossing(const std::function<double(double)>& h, double lo, double hi, double tol,
                     int scan_points = 64, int* sign_changes = nullptr);

struct MapState {
  StateVector x;  // x(A_n)
  double a = 0.0;
};

/// Advances the discrete-time model one period: from x(A_n) with duty a_n to x(A_{n+1})
/// and a_{n+1}. Throws NoCrossing if a_{n+1} has no root in (0, 1).
MapState discrete_map_step(const Model& model, const InputSignal& input, long n,
                           const StateVector& x_at_An, double a_n);

/// Sawtooth carrier v(t) = -1 + 2 (t - nT)/T.
double carrier(double t, double period);

}  // namespace classd
