#pragma once

#include <array>

#include "classd/stability.hpp"

namespace classd {

/// e^{NT} (I + (T kappa / LC) e5 gamma^T), the period map sampled at the carrier edge.
Matrix5 script_n(const Model& model, double kappa);

using Sigma = std::array<Complex, 3>;

/// sigma(T; i w) = sum_m P_{m+1}(T) (i w)^m, components e1..e3.
Sigma sigma(const AmplifierParams& params, double omega);
/// The closed forms alone; singular at w = 0 and |w| = omega1.
Sigma sigma_closed_form(const AmplifierParams& params, double omega);
/// The defining power series, accurate for |w T| <= pi.
Sigma sigma_series(const AmplifierParams& params, double omega);

/// Input-to-output transfer function of the small-signal model about constant u0.
class TransferFunction {
 public:
  TransferFunction(const Model& model, double u0);

  double u0() const { return u0_; }
  double kappa() const { return kappa_; }
  const Matrix5& script_n() const { return script_n_; }

  /// kappa gamma^T (e^{i w T} I - script_n)^{-1} sigma. Throws Resonance when
  /// e^{i w T} is (numerically) an eigenvalue of script_n.
  Complex operator()(double omega) const;

  /// b in TF(w) = 1 + i w T b + O(w^2), the first-order behaviour in wT.
  double low_frequency_slope() const;

 private:
  const Model* model_;
  double u0_;
  double kappa_;
  Matrix5 script_n_;
  Spectrum eigenvalues_;
};

Complex transfer_function(const Model& model, double u0, double omega);

}  // namespace classd
