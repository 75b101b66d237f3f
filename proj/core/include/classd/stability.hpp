#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "classd/steady_state.hpp"

namespace classd {

using Spectrum = std::array<Complex, 5>;

/// Linearised period map about a steady state.
struct StabilityReport {
  double u0 = 0.0;
  double kappa = 1.0;
  Matrix5 monodromy = Matrix5::Zero();
  /// Sorted by descending magnitude.
  Spectrum eigenvalues{};
  double spectral_radius = 0.0;
  bool stable = false;
};

/// Transversality factor 1 / (1 - T slope / 2). Throws TransversalityViolation when the
/// switching is (nearly) grazing.
double compute_kappa(const AmplifierParams& params, const SteadyState& ss);

/// e^{N(1-a)T} (I + (T kappa / LC) e5 gamma^T) e^{NaT}.
Matrix5 monodromy_matrix(const Model& model, double a, double kappa);

/// Eigenvalues of a real 5x5 matrix, largest magnitude first.
Spectrum sorted_eigenvalues(const Matrix5& m);

StabilityReport monodromy(const Model& model, double u0);
/// Same, with kappa forced to the given value instead of the steady-state one.
StabilityReport monodromy(const Model& model, double u0, double kappa);

/// Scalar characteristic function of the rank-one update; vanishes exactly at the
/// eigenvalues of the monodromy matrix. Throws Pole near any e^{lambda_j T}.
Complex sylvester_residual(const Model& model, double kappa, Complex mu);
/// Same, with kappa taken from the steady state at u0.
Complex sylvester_residual_at_input(const Model& model, double u0, Complex mu);

/// Bisects spectral_radius - 1 in parameter `name` on [lo, hi] to absolute tolerance
/// `tol`. The other parameters come from `base`.
double stability_threshold(const AmplifierParams& base, double u0, std::string_view name,
                           double lo, double hi, double tol = 10.0);

/// Reorders each spectrum to follow its predecessor, pairing by least total distance,
/// so that index j traces one eigenvalue branch along a sweep.
std::vector<Spectrum> track_eigenvalues(const std::vector<Spectrum>& spectra);

}  // namespace classd
