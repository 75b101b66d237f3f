#pragma once

#include <array>

#include "classd/params.hpp"
#include "classd/types.hpp"

namespace classd {

/// Highest iterated-integral order served by phi() and eta().
inline constexpr int kMaxIntegralOrder = 40;

/// Relative size of a discarded imaginary part before we call the modal basis broken.
inline constexpr double kImagResidueTol = 1e-9;

/// The 5x5 matrix N of x' = N x + u e1 + (g + k v)/(LC) e5.
Matrix5 build_system_matrix(const AmplifierParams& params);

/// Exact eigen-structure of N.
///
/// Eigenvalues are ordered (0, i w1, -i w1, -mu + i Omega, -mu - i Omega). Columns of
/// `right` are right eigenvectors; `left` is the numerical inverse of `right`, so its
/// rows are the left eigenvectors paired biorthogonally with the columns. Column 0 is
/// w1 = (-LC, 0, -LC/w1^2, 0, 0), which makes row 0 of `left` equal to
/// v1 = (-1/LC, 0, 0, 1/RC, 1).
struct ModalDecomposition {
  std::array<Complex, 5> lambda{};
  CMatrix5 right = CMatrix5::Zero();
  CMatrix5 left = CMatrix5::Zero();
  double mu = 0.0;
  double capital_omega = 0.0;

  /// Same decomposition with column j of `right` scaled by `scale[j]` (and row j of
  /// `left` by its reciprocal). Observables must not change.
  ModalDecomposition rescaled(const std::array<Complex, 5>& scale) const;
};

/// Throws DegenerateSpectrum when two eigenvalues of N (nearly) coincide.
ModalDecomposition modal_decomposition(const AmplifierParams& params);

/// n-fold iterated integral of cos(omega1 s) from 0 to t; phi(-1) = cos(omega1 t).
double phi(int n, double t, double omega1);

/// n-fold iterated integral of exp(lambda s) from 0 to t; eta(0) = exp(lambda t).
Complex eta(int n, Complex lambda, double t);

/// Immutable amplifier model: parameters, N, and its modal decomposition.
///
/// Everything is a pure function of the constructor arguments, so one Model may be
/// shared freely between threads.
class Model {
 public:
  explicit Model(const AmplifierParams& params);
  Model(const AmplifierParams& params, const ModalDecomposition& modes);

  const AmplifierParams& params() const { return params_; }
  const Matrix5& system_matrix() const { return n_; }
  const ModalDecomposition& modes() const { return modes_; }

  RowVector5 gamma() const;
  /// Left null vector of N in closed form.
  RowVector5 v1() const;
  /// Right null vector of N in closed form, v1 * w1 = 1.
  StateVector w1() const;

  /// exp(N t) through the modal basis.
  Matrix5 matrix_exp(double t) const;

  /// P_n(t) = t^n/n! e1 + phi_n(t) e2 + phi_{n+1}(t) e3.
  StateVector p_vec(int n, double t) const;

  /// Q_n(t), the n-fold iterated integral of exp(N s) e5.
  StateVector q_vec(int n, double t) const;

  /// R^{-1} e5, the modal coordinates of the filter drive direction.
  const CVector5& modal_e5() const { return modal_e5_; }
  /// gamma^T R, the compensator output expressed on the modes.
  const CRowVector5& modal_gamma() const { return modal_gamma_; }

  /// R diag(values) R^{-1} rhs, projected to the reals after the residue check.
  StateVector modal_apply(const CVector5& values, const CVector5& modal_rhs) const;

 private:
  AmplifierParams params_;
  Matrix5 n_;
  ModalDecomposition modes_;
  CVector5 modal_e5_;
  CRowVector5 modal_gamma_;
};

/// Drops the imaginary part of `value` after checking it is below kImagResidueTol of
/// `scale`. Throws ResidueTooLarge otherwise.
double checked_real(Complex value, double scale, const char* what);

}  // namespace classd
