#include "classd/model.hpp"

#include <cmath>
#include <string>

#include "classd/error.hpp"

namespace classd {
namespace {

// Below this |argument| the power series is used; above it the closed forms, whose
// cancellation is then harmless.
constexpr double kSeriesRadius = 4.0;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_order(int n, int lowest) {
  if (n < lowest || n > kMaxIntegralOrder) {
    throw Error(ErrorKind::UnsupportedOrder,
                "iterated-integral order " + std::to_string(n) + " outside [" +
                    std::to_string(lowest) + ", " + std::to_string(kMaxIntegralOrder) + "]");
  }
}

// Inverse with row/column equilibration. R mixes entries from 1e-22 to 1e5, and a plain
// LU loses about five digits on it.
CMatrix5 equilibrated_inverse(const CMatrix5& m) {
  Eigen::Matrix<double, 5, 1> row_scale;
  Eigen::Matrix<double, 5, 1> col_scale;
  for (int i = 0; i < 5; ++i) row_scale(i) = 1.0 / m.row(i).cwiseAbs().maxCoeff();
  CMatrix5 scaled = row_scale.asDiagonal() * m;
  for (int j = 0; j < 5; ++j) col_scale(j) = 1.0 / scaled.col(j).cwiseAbs().maxCoeff();
  scaled = scaled * col_scale.asDiagonal();
  Eigen::FullPivLU<CMatrix5> lu(scaled);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::DegenerateSpectrum, "eigenvector matrix is singular");
  }
  return col_scale.asDiagonal() * lu.inverse() * row_scale.asDiagonal();
}

}  // namespace

double checked_real(Complex value, double scale, const char* what) {
  if (std::abs(value.imag()) > kImagResidueTol * scale) {
    throw Error(ErrorKind::ResidueTooLarge,
                std::string(what) + ": imaginary residue " + std::to_string(value.imag()) +
                    " against scale " + std::to_string(scale));
  }
  return value.real();
}

Matrix5 build_system_matrix(const AmplifierParams& params) {
  params.validate();
  Matrix5 n = Matrix5::Zero();
  // Compensator block M3 and its drive by the filter output.
  n(0, 3) = -1.0;
  n(1, 0) = 1.0;
  n(1, 2) = -params.omega1 * params.omega1;
  n(2, 1) = 1.0;
  // Output filter block M2.
  n(3, 4) = 1.0;
  n(4, 3) = -1.0 / params.lc();
  n(4, 4) = -1.0 / params.rc();
  return n;
}

ModalDecomposition modal_decomposition(const AmplifierParams& params) {
  params.validate();
  ModalDecomposition md;
  md.mu = params.damping();
  md.capital_omega = params.ring_frequency();
  const double w1 = params.omega1;
  const Complex i(0.0, 1.0);
  md.lambda = {Complex(0.0), i * w1, -i * w1, Complex(-md.mu, md.capital_omega),
               Complex(-md.mu, -md.capital_omega)};

  // Relative separation of the spectrum; a collision makes R singular.
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      const double scale = std::max({std::abs(md.lambda[a]), std::abs(md.lambda[b]), 1.0 / params.T});
      if (std::abs(md.lambda[a] - md.lambda[b]) < 1e-9 * scale) {
        throw Error(ErrorKind::DegenerateSpectrum,
                    "eigenvalues " + std::to_string(a) + " and " + std::to_string(b) + " collide");
      }
    }
  }

  const double lc = params.lc();
  md.right.col(0) << -lc, 0.0, -lc / (w1 * w1), 0.0, 0.0;
  for (int j : {1, 2}) {
    md.right.col(j) << 0.0, md.lambda[j], 1.0, 0.0, 0.0;
  }
  for (int j : {3, 4}) {
    const Complex l = md.lambda[j];
    const Complex m1 = -1.0 / l;
    const Complex m3 = m1 / (l * l + w1 * w1);
    md.right.col(j) << m1, l * m3, m3, 1.0, l;
  }
  md.left = equilibrated_inverse(md.right);
  return md;
}

ModalDecomposition ModalDecomposition::rescaled(const std::array<Complex, 5>& scale) const {
  ModalDecomposition out = *this;
  for (int j = 0; j < 5; ++j) {
    out.right.col(j) *= scale[j];
    out.left.row(j) /= scale[j];
  }
  return out;
}

double phi(int n, double t, double omega1) {
  check_order(n, -1);
  if (n == -1) return std::cos(omega1 * t);
  const double x = omega1 * t;
  if (std::abs(x) <= kSeriesRadius) {
    // phi_n(t) = t^{n+1} sum_l (-1)^l x^{2l} / (2l + n + 1)!
    double term = 1.0 / factorial(n + 1);
    double sum = term;
    for (int l = 1; l < 200; ++l) {
      term *= -x * x / ((2 * l + n) * (2.0 * l + n + 1));
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return std::pow(t, n + 1) * sum;
  }
  // Re[(i w)^{-(n+1)} (exp(i w t) - sum_{j<=n} (i w t)^j / j!)]
  const Complex ix(0.0, x);
  Complex taylor = 0.0;
  Complex power = 1.0;
  for (int j = 0; j <= n; ++j) {
    taylor += power / factorial(j);
    power *= ix;
  }
  const Complex value = (std::exp(ix) - taylor) / std::pow(Complex(0.0, omega1), n + 1);
  return value.real();
}

Complex eta(int n, Complex lambda, double t) {
  check_order(n, 0);
  const Complex z = lambda * t;
  if (n == 0) return std::exp(z);
  if (std::abs(z) <= kSeriesRadius) {
    // eta_n = t^n sum_m z^m / (m + n)!
    Complex term = 1.0 / factorial(n);
    Complex sum = term;
    for (int m = 1; m < 200; ++m) {
      term *= z / static_cast<double>(m + n);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return std::pow(t, n) * sum;
  }
  Complex taylor = 0.0;
  Complex power = 1.0;
  for (int j = 0; j < n; ++j) {
    taylor += power / factorial(j);
    power *= z;
  }
  return (std::exp(z) - taylor) / std::pow(lambda, n);
}

Model::Model(const AmplifierParams& params)
    : Model(params, modal_decomposition(params)) {}

Model::Model(const AmplifierParams& params, const ModalDecomposition& modes)
    : params_(params), n_(build_system_matrix(params)), modes_(modes) {
  modal_e5_ = modes_.left.col(4);
  const auto g = params_.gamma();
  CRowVector5 gamma_row;
  for (int j = 0; j < 5; ++j) gamma_row(j) = g[j];
  modal_gamma_ = gamma_row * modes_.right;
}

RowVector5 Model::gamma() const {
  const auto g = params_.gamma();
  RowVector5 row;
  row << g[0], g[1], g[2], g[3], g[4];
  return row;
}

RowVector5 Model::v1() const {
  RowVector5 v;
  v << -1.0 / params_.lc(), 0.0, 0.0, 1.0 / params_.rc(), 1.0;
  return v;
}

StateVector Model::w1() const {
  StateVector w;
  const double lc = params_.lc();
  w << -lc, 0.0, -lc / (params_.omega1 * params_.omega1), 0.0, 0.0;
  return w;
}

Matrix5 Model::matrix_exp(double t) const {
  CVector5 e;
  for (int j = 0; j < 5; ++j) e(j) = std::exp(modes_.lambda[j] * t);
  const CMatrix5 value = modes_.right * e.asDiagonal() * modes_.left;
  const Eigen::Matrix<double, 5, 5> scale =
      modes_.right.cwiseAbs() * e.cwiseAbs().asDiagonal() * modes_.left.cwiseAbs();
  Matrix5 out;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) out(r, c) = checked_real(value(r, c), scale(r, c), "matrix_exp");
  }
  return out;
}

StateVector Model::modal_apply(const CVector5& values, const CVector5& modal_rhs) const {
  const CVector5 value = modes_.right * values.cwiseProduct(modal_rhs);
  const Eigen::Matrix<double, 5, 1> scale =
      modes_.right.cwiseAbs() * values.cwiseAbs().cwiseProduct(modal_rhs.cwiseAbs());
  StateVector out;
  for (int r = 0; r < 5; ++r) out(r) = checked_real(value(r), scale(r), "modal_apply");
  return out;
}

StateVector Model::p_vec(int n, double t) const {
  check_order(n, 0);
  StateVector p = StateVector::Zero();
  p(0) = std::pow(t, n) / factorial(n);
  p(1) = phi(n, t, params_.omega1);
  p(2) = phi(n + 1, t, params_.omega1);
  return p;
}

StateVector Model::q_vec(int n, double t) const {
  CVector5 values;
  for (int j = 0; j < 5; ++j) values(j) = eta(n, modes_.lambda[j], t);
  return modal_apply(values, modal_e5_);
}

}  // namespace classd
