#pragma once

#include <vector>

#include "classd/model.hpp"
#include "classd/propagation.hpp"

namespace classd {

/// Duty cycle (1 + u0)/2 of the T-periodic response to a constant input.
double duty_cycle(double u0);

/// T-periodic operating point for a constant input u0.
struct SteadyState {
  double u0 = 0.0;
  double a = 0.5;
  /// State at the falling edge t = aT.
  StateVector x_at_switch = StateVector::Zero();
  /// gamma^T x'(aT), the compensator slope at the falling edge (1/s).
  double slope = 0.0;
  /// Row of (I - e^{NT}) that was traded for the switching condition.
  int replaced_row = 0;
};

/// Forcing vector Phi(a, T) of the periodicity system (I - e^{NT}) x(aT) = Phi.
StateVector periodic_forcing(const Model& model, double u0, double a);

/// Solves for the operating point. Throws SingularSystem if every admissible row
/// replacement leaves a numerically singular system (equilibrated condition > 1e12).
SteadyState solve_steady_state(const Model& model, double u0);

/// Constant offset between RC steady states with duty cycles a and b:
/// x_b(t + (b - a)T) = x_a(t) + delta.
StateVector rc_shift_delta(const AmplifierParams& params, double a, double b);

struct PeriodSample {
  double t = 0.0;
  StateVector x = StateVector::Zero();
  double m = 0.0;
};

/// Samples the periodic orbit on [aT, aT + T] (both ends included).
std::vector<PeriodSample> reconstruct_period(const Model& model, const SteadyState& ss,
                                             int n_samples);

/// Steady state at the rising edge t = 0 (mod T), the usual simulation start.
StateVector state_at_carrier_edge(const Model& model, const SteadyState& ss);

/// Forcing for a constant-input segment with output level g starting at carrier
/// position v_start.
SegmentForcing constant_input_forcing(const AmplifierParams& params, double u0, double g,
                                      double v_start);

}  // namespace classd
