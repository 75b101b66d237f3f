#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "classd/input_signal.hpp"
#include "classd/model.hpp"

namespace classd {

/// Audio input in slow time tau = omega_audio t.
struct SlowInput {
  std::function<double(double)> U;
  /// dU/dtau, supplied in closed form.
  std::function<double(double)> U_prime;
  double epsilon = 0.0;
  double omega_audio = 0.0;
};

/// U(tau) = amplitude sin(tau) at audio frequency f (Hz).
SlowInput sine_slow_input(double amplitude, double frequency, double carrier_period);

/// Slow form of an InputSignal whose tones are all harmonics of `base_frequency`:
/// tau = 2 pi base_frequency t. Throws InvalidParameter for a tone off that grid.
SlowInput slow_input(const InputSignal& input, double base_frequency, double carrier_period);

/// Largest f with every tone frequency an integer multiple of f (tones with rational
/// ratios). Throws InvalidParameter for a constant input.
double base_frequency(const InputSignal& input);

/// Leading-order duty cycle (1 + U)/2. Throws Saturation for |U| >= 1.
double a0(double U);

/// diag(-1/2, (1 - e^{lambda_j T})^{-1}, ...) in the modal order of Model.
CMatrix5 upsilon0(const AmplifierParams& params);
CMatrix5 upsilon0(const ModalDecomposition& modes, double carrier_period);

/// Slow-time averaging of the period map: the scalars p_n, q_n, psi and the first
/// correction g1 to the audio output.
class Perturbation {
 public:
  explicit Perturbation(const Model& model);

  const Model& model() const { return *model_; }

  /// (p_n(t), q_n(t)) = gamma^T R Upsilon0 R^{-1} (P_n(t), Q_n(t)).
  std::pair<double, double> pq(int n, double t) const;
  double psi(double U) const;
  double g1(double U, double U_prime) const;
  /// First-order duty-cycle correction, from g1 = 2 a1 - 2 a0 a0'.
  double a1(double U, double U_prime) const;

 private:
  const Model* model_;
  CRowVector5 weights_;  // gamma^T R Upsilon0
  double p1_T_;
  double q1_T_;
};

struct AudioPrediction {
  int order = 1;
  /// (t, g_a(t)) on the requested uniform grid.
  std::vector<std::pair<double, double>> samples;
  /// (harmonic index n, coefficient (1/W) int g_a e^{-i n w t} dt); index 0 is the mean.
  std::vector<std::pair<int, Complex>> fourier;
};

struct PredictionOptions {
  int order = 1;
  /// Harmonics 0..n_harmonics are returned; 0 returns the mean only, -1 none.
  int n_harmonics = -1;
  /// Trapezoid points per input period for the Fourier sums.
  int fourier_points = 4096;
  /// Drop the psi part of g1 (for isolating the U U'/2 distortion term).
  bool include_psi = true;
};

/// g_a(t) = U + eps g1 at order 1, or U at order 0, sampled at `sample_rate` over
/// [0, duration). sample_rate = 0 skips the samples.
AudioPrediction predict_audio(const Model& model, const SlowInput& input, double duration,
                              double sample_rate, const PredictionOptions& options = {});

}  // namespace classd
