#include "classd/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "classd/error.hpp"
#include "classd/spectral.hpp"

namespace classd {

SlowInput sine_slow_input(double amplitude, double frequency, double carrier_period) {
  if (!(frequency > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "audio frequency must be positive");
  }
  SlowInput in;
  in.U = [amplitude](double tau) { return amplitude * std::sin(tau); };
  in.U_prime = [amplitude](double tau) { return amplitude * std::cos(tau); };
  in.omega_audio = 2.0 * std::numbers::pi * frequency;
  in.epsilon = in.omega_audio * carrier_period;
  return in;
}

double base_frequency(const InputSignal& input) {
  if (input.tones().empty()) {
    throw Error(ErrorKind::InvalidParameter, "a constant input has no base frequency");
  }
  double f0 = input.tones().front().frequency;
  for (const auto& tone : input.tones()) {
    // f = f0 p/q in lowest terms, so gcd(f0, f) = f0/q.
    f0 /= rationalize(tone.frequency / f0).den;
  }
  return f0;
}

SlowInput slow_input(const InputSignal& input, double base_frequency, double carrier_period) {
  if (!(base_frequency > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "audio frequency must be positive");
  }
  struct Harmonic {
    double amplitude, multiple, phase;
  };
  std::vector<Harmonic> parts;
  for (const auto& tone : input.tones()) {
    const double m = tone.frequency / base_frequency;
    if (std::abs(m - std::round(m)) > 1e-9 * m || std::round(m) < 1.0) {
      throw Error(ErrorKind::InvalidParameter,
                  "tone at " + std::to_string(tone.frequency) + " Hz is not a harmonic of " +
                      std::to_string(base_frequency) + " Hz");
    }
    parts.push_back({tone.amplitude, std::round(m), tone.phase});
  }
  const double offset = input.offset();
  SlowInput in;
  in.U = [parts, offset](double tau) {
    double u = offset;
    for (const auto& h : parts) u += h.amplitude * std::sin(h.multiple * tau + h.phase);
    return u;
  };
  in.U_prime = [parts](double tau) {
    double u = 0.0;
    for (const auto& h : parts) u += h.amplitude * h.multiple * std::cos(h.multiple * tau + h.phase);
    return u;
  };
  in.omega_audio = 2.0 * std::numbers::pi * base_frequency;
  in.epsilon = in.omega_audio * carrier_period;
  return in;
}

double a0(double U) {
  if (!(std::abs(U) < 1.0)) {
    throw Error(ErrorKind::Saturation, "slow input reached |U| = 1");
  }
  return 0.5 * (1.0 + U);
}

CMatrix5 upsilon0(const AmplifierParams& params) {
  return upsilon0(modal_decomposition(params), params.T);
}

CMatrix5 upsilon0(const ModalDecomposition& modes, double carrier_period) {
  CMatrix5 u = CMatrix5::Zero();
  u(0, 0) = -0.5;
  for (int j = 1; j < 5; ++j) {
    const Complex d = 1.0 - std::exp(modes.lambda[j] * carrier_period);
    if (std::abs(d) < 1e-12) {
      throw Error(ErrorKind::Resonance, "carrier resonant with mode " + std::to_string(j));
    }
    u(j, j) = 1.0 / d;
  }
  return u;
}

Perturbation::Perturbation(const Model& model) : model_(&model) {
  const auto& p = model.params();
  const CMatrix5 ups = upsilon0(model.modes(), p.T);
  weights_ = model.modal_gamma() * ups;
  p1_T_ = pq(1, p.T).first;
  q1_T_ = pq(1, p.T).second;
}

std::pair<double, double> Perturbation::pq(int n, double t) const {
  if (n < 0) {
    throw Error(ErrorKind::UnsupportedOrder, "p_n, q_n need n >= 0");
  }
  const auto& modes = model_->modes();
  const CVector5 modal_p = modes.left * model_->p_vec(n, t).cast<Complex>();
  Complex p = 0.0;
  Complex q = 0.0;
  double p_scale = 0.0;
  double q_scale = 0.0;
  for (int j = 0; j < 5; ++j) {
    const Complex pj = weights_(j) * modal_p(j);
    const Complex qj = weights_(j) * eta(n, modes.lambda[j], t) * model_->modal_e5()(j);
    p += pj;
    q += qj;
    p_scale += std::abs(pj);
    q_scale += std::abs(qj);
  }
  return {checked_real(p, p_scale, "p_n"), checked_real(q, q_scale, "q_n")};
}

double Perturbation::psi(double U) const {
  const auto& p = model_->params();
  const double k = p.k;
  double value = p1_T_ + (k / p.lc()) * q1_T_;
  if (p.k == 0) value += (p.T / p.lc()) * pq(0, a0(U) * p.T).second;
  return value;
}

double Perturbation::g1(double U, double U_prime) const {
  const auto& p = model_->params();
  const double gain = p.loop_gain_constant();
  if (gain == 0.0) {
    throw Error(ErrorKind::DivisionByZero, "c1*omega1^2 + c3 = 0");
  }
  a0(U);
  const double w2 = p.omega1 * p.omega1;
  return (1 - p.k) * U * U_prime / 2.0 - w2 * (1.0 - psi(U)) * U_prime / (gain * p.T);
}

double Perturbation::a1(double U, double U_prime) const {
  return 0.5 * g1(U, U_prime) + a0(U) * 0.5 * U_prime;
}

AudioPrediction predict_audio(const Model& model, const SlowInput& input, double duration,
                              double sample_rate, const PredictionOptions& options) {
  if (options.order != 0 && options.order != 1) {
    throw Error(ErrorKind::UnsupportedOrder, "prediction order must be 0 or 1");
  }
  if (!(input.omega_audio > 0.0) || !input.U || !input.U_prime) {
    throw Error(ErrorKind::InvalidParameter, "slow input needs U, U' and omega_audio > 0");
  }
  if (std::abs(input.epsilon - input.omega_audio * model.params().T) >
      1e-12 * std::abs(input.epsilon)) {
    throw Error(ErrorKind::InvalidParameter, "epsilon must equal omega_audio * T");
  }
  const Perturbation pert(model);
  const auto& p = model.params();
  auto output = [&](double tau) {
    const double u = input.U(tau);
    a0(u);
    if (options.order == 0) return u;
    const double up = input.U_prime(tau);
    double g1 = 0.0;
    if (options.include_psi) {
      g1 = pert.g1(u, up);
    } else {
      const double w2 = p.omega1 * p.omega1;
      g1 = (1 - p.k) * u * up / 2.0 - w2 * up / (p.loop_gain_constant() * p.T);
    }
    return u + input.epsilon * g1;
  };

  AudioPrediction out;
  out.order = options.order;
  if (sample_rate > 0.0) {
    const auto n = static_cast<long>(std::floor(duration * sample_rate + 1e-9));
    out.samples.reserve(n);
    for (long i = 0; i < n; ++i) {
      const double t = i / sample_rate;
      out.samples.emplace_back(t, output(input.omega_audio * t));
    }
  }
  if (options.n_harmonics >= 0) {
    if (options.fourier_points < 4096) {
      throw Error(ErrorKind::InvalidParameter, "Fourier sums need at least 4096 points");
    }
    const double cycles = duration * input.omega_audio / (2.0 * std::numbers::pi);
    if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles) ||
        std::round(cycles) < 1.0) {
      throw Error(ErrorKind::WindowMisaligned,
                  "duration must be a whole number of input periods for Fourier output");
    }
    // Periodic integrand: the trapezoid rule over one period is the plain mean.
    const int m = options.fourier_points;
    std::vector<double> g(m);
    for (int i = 0; i < m; ++i) g[i] = output(2.0 * std::numbers::pi * i / m);
    for (int h = 0; h <= options.n_harmonics; ++h) {
      Complex sum = 0.0;
      for (int i = 0; i < m; ++i) {
        sum += g[i] * std::polar(1.0, -2.0 * std::numbers::pi * h * i / m);
      }
      out.fourier.emplace_back(h, sum / static_cast<double>(m));
    }
  }
  return out;
}

}  // namespace classd
