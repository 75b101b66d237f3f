#include "classd/input_signal.hpp"

#include <cmath>
#include <numbers>

#include "classd/error.hpp"

namespace classd {

InputSignal InputSignal::constant(double u0) {
  InputSignal s;
  s.kind_ = Kind::Constant;
  s.offset_ = u0;
  return s;
}

InputSignal InputSignal::sine(double amplitude, double frequency, double phase) {
  InputSignal s = sum_of_sines({Tone{amplitude, frequency, phase}});
  s.kind_ = Kind::Sine;
  return s;
}

InputSignal InputSignal::sum_of_sines(std::vector<Tone> tones, double offset) {
  for (const Tone& t : tones) {
    if (!(t.frequency > 0.0) || !std::isfinite(t.amplitude) || !std::isfinite(t.phase)) {
      throw Error(ErrorKind::InvalidParameter, "tone needs a positive frequency and finite values");
    }
  }
  InputSignal s;
  s.kind_ = Kind::SumOfSines;
  s.offset_ = offset;
  s.tones_ = std::move(tones);
  return s;
}

double InputSignal::value(double t) const { return derivative(0, t); }

double InputSignal::derivative(int order, double t) const {
  if (order < 0) {
    throw Error(ErrorKind::UnsupportedOrder, "negative derivative order");
  }
  double sum = order == 0 ? offset_ : 0.0;
  for (const Tone& tone : tones_) {
    const double w = 2.0 * std::numbers::pi * tone.frequency;
    // d^n/dt^n sin(x) = sin(x + n pi/2)
    sum += tone.amplitude * std::pow(w, order) *
           std::sin(w * t + tone.phase + order * std::numbers::pi / 2.0);
  }
  return sum;
}

double InputSignal::max_abs() const { return std::abs(offset_) + derivative_bound(0); }

double InputSignal::derivative_bound(int order) const {
  double sum = 0.0;
  for (const Tone& tone : tones_) {
    sum += std::abs(tone.amplitude) * std::pow(2.0 * std::numbers::pi * tone.frequency, order);
  }
  return sum;
}

void InputSignal::validate() const {
  if (!(max_abs() <= 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "input must satisfy |u| <= 1");
  }
}

}  // namespace classd
