#include "classd/small_signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "classd/error.hpp"

namespace classd {
namespace {

// Inside these windows the closed forms cancel badly and the series takes over. Near
// w = 0 the window covers the whole audio band; the series is exact there to rounding.
constexpr double kLowWindow = 1.0;       // |w| T
constexpr double kResonantWindow = 1e-2; // | |w| - omega1 | / omega1

void check_band(const AmplifierParams& params, double omega) {
  if (!(std::abs(omega) < std::numbers::pi / params.T)) {
    throw Error(ErrorKind::InvalidParameter, "frequency outside the audio band |w| < pi/T");
  }
}

}  // namespace

Matrix5 script_n(const Model& model, double kappa) {
  const auto& p = model.params();
  Matrix5 jump = Matrix5::Identity();
  jump.row(4) += (p.T * kappa / p.lc()) * model.gamma();
  return model.matrix_exp(p.T) * jump;
}

Sigma sigma_closed_form(const AmplifierParams& params, double omega) {
  const double t = params.T;
  const double w = omega;
  const double w1 = params.omega1;
  const Complex i(0.0, 1.0);
  const double d = w * w - w1 * w1;
  Sigma s;
  s[0] = (std::exp(i * w * t) - 1.0) / (i * w);
  s[1] = (i * w * std::sin(w1 * t) - i * w1 * std::sin(w * t) +
          w1 * (std::cos(w1 * t) - std::cos(w * t))) /
         (w1 * d);
  s[2] = Complex((w * std::sin(w1 * t) - w1 * std::sin(w * t)) / (w * w1 * d),
                 (w1 * w1 * std::cos(w * t) - w * w * std::cos(w1 * t) + w * w - w1 * w1) /
                     (w * w1 * w1 * d));
  return s;
}

Sigma sigma_series(const AmplifierParams& params, double omega) {
  check_band(params, omega);
  const double t = params.T;
  Sigma s{0.0, 0.0, 0.0};
  Complex power = 1.0;
  const Complex iw(0.0, omega);
  double e1_term = t;  // t^{m+1}/(m+1)!
  for (int m = 0; m + 2 <= kMaxIntegralOrder; ++m) {
    const Complex d0 = e1_term * power;
    const Complex d1 = phi(m + 1, t, params.omega1) * power;
    const Complex d2 = phi(m + 2, t, params.omega1) * power;
    s[0] += d0;
    s[1] += d1;
    s[2] += d2;
    if (std::abs(d0) <= 1e-18 * std::abs(s[0]) && std::abs(d1) <= 1e-18 * std::abs(s[1]) &&
        std::abs(d2) <= 1e-18 * std::abs(s[2])) {
      break;
    }
    power *= iw;
    e1_term *= t / (m + 2);
  }
  return s;
}

Sigma sigma(const AmplifierParams& params, double omega) {
  check_band(params, omega);
  const double near_zero = std::abs(omega) * params.T;
  const double near_resonance = std::abs(std::abs(omega) - params.omega1) / params.omega1;
  if (near_zero < kLowWindow || near_resonance < kResonantWindow) {
    return sigma_series(params, omega);
  }
  return sigma_closed_form(params, omega);
}

TransferFunction::TransferFunction(const Model& model, double u0) : model_(&model), u0_(u0) {
  const SteadyState ss = solve_steady_state(model, u0);
  kappa_ = compute_kappa(model.params(), ss);
  script_n_ = classd::script_n(model, kappa_);
  eigenvalues_ = sorted_eigenvalues(script_n_);
}

Complex TransferFunction::operator()(double omega) const {
  const auto& p = model_->params();
  const Sigma s = sigma(p, omega);
  const Complex z = std::exp(Complex(0.0, omega * p.T));
  const CMatrix5 a = z * CMatrix5::Identity() - script_n_.cast<Complex>();

  // det(zI - N) = prod (z - mu_j), measured against prod (|z| + |mu_j|).
  double det = 1.0;
  double scale = 1.0;
  for (Complex mu : eigenvalues_) {
    det *= std::abs(z - mu);
    scale *= 1.0 + std::abs(mu);
  }
  if (det < 1e-14 * scale) {
    throw Error(ErrorKind::Resonance,
                "e^{iwT} is an eigenvalue of the period map at w = " + std::to_string(omega));
  }
  CVector5 rhs = CVector5::Zero();
  rhs << s[0], s[1], s[2], 0.0, 0.0;
  const CVector5 y = a.partialPivLu().solve(rhs);
  Complex value = 0.0;
  const RowVector5 g = model_->gamma();
  for (int j = 0; j < 5; ++j) value += g(j) * y(j);
  return kappa_ * value;
}

double TransferFunction::low_frequency_slope() const {
  const auto& p = model_->params();
  const Matrix5 a = Matrix5::Identity() - script_n_;
  const auto lu = a.partialPivLu();
  const StateVector first = lu.solve(model_->p_vec(1, p.T));
  const StateVector second = lu.solve(first);
  const StateVector y = -second + lu.solve(model_->p_vec(2, p.T)) / p.T;
  return kappa_ * (model_->gamma() * y)(0);
}

Complex transfer_function(const Model& model, double u0, double omega) {
  return TransferFunction(model, u0)(omega);
}

}  // namespace classd
