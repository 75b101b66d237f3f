#pragma once

#include <array>
#include <string_view>

namespace classd {

/// Circuit and compensator constants, SI units throughout.
struct AmplifierParams {
  double R = 8.0;            // load resistance (ohm)
  double L = 10e-6;          // filter inductance (H)
  double C = 0.5169e-6;      // filter capacitance (F)
  double T = 1.0 / 384000.0; // carrier period (s)
  double c1 = 1.3318e5;      // compensator gains (1/s, 1/s^2, 1/s^3)
  double c2 = 1.3763e10;
  double c3 = -1.0747e14;
  double omega1 = 1.3195e5;  // resonator frequency (rad/s)
  int k = 0;                 // ripple compensation on (1) / off (0)

  /// Reference design values; stable at all inputs for either k.
  static AmplifierParams defaults(int k = 0);

  /// Throws Error(InvalidParameter) naming the offending field.
  void validate() const;

  double lc() const { return L * C; }
  double rc() const { return R * C; }
  /// Filter damping rate 1/(2RC).
  double damping() const { return 1.0 / (2.0 * R * C); }
  /// Filter ring frequency; NaN when the filter is not underdamped.
  double ring_frequency() const;
  /// c1*omega1^2 + c3, the combination that sets the low-frequency loop gain.
  double loop_gain_constant() const { return c1 * omega1 * omega1 + c3; }

  /// Compensator output weights (c1, c2, c3, 0, 0).
  std::array<double, 5> gamma() const { return {c1, c2, c3, 0.0, 0.0}; }

  /// Named access for sweeps and overrides. Names: R L C T c1 c2 c3 omega1.
  double get(std::string_view name) const;
  void set(std::string_view name, double value);
  static bool is_sweepable(std::string_view name);
};

inline constexpr std::array<std::string_view, 8> kSweepableParams = {
    "R", "L", "C", "T", "c1", "c2", "c3", "omega1"};

}  // namespace classd
