#pragma once

#include <vector>

namespace classd {

/// One sinusoidal component amplitude * sin(2 pi frequency t + phase).
struct Tone {
  double amplitude = 0.0;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
};

/// Audio input u(t): a constant plus any number of tones.
class InputSignal {
 public:
  enum class Kind { Constant, Sine, SumOfSines };

  static InputSignal constant(double u0);
  static InputSignal sine(double amplitude, double frequency, double phase = 0.0);
  static InputSignal sum_of_sines(std::vector<Tone> tones, double offset = 0.0);

  Kind kind() const { return kind_; }
  double offset() const { return offset_; }
  const std::vector<Tone>& tones() const { return tones_; }

  double value(double t) const;
  /// d^order u / dt^order; order 0 is the value.
  double derivative(int order, double t) const;

  /// Bound on |u| over all t (|offset| + sum of amplitudes).
  double max_abs() const;
  /// Bound on |u^{(order)}| over all t.
  double derivative_bound(int order) const;

  /// Throws InvalidParameter if |u| can exceed 1.
  void validate() const;

 private:
  Kind kind_ = Kind::Constant;
  double offset_ = 0.0;
  std::vector<Tone> tones_;
};

}  // namespace classd
