#include "classd/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "classd/error.hpp"

namespace classd {

double compute_kappa(const AmplifierParams& params, const SteadyState& ss) {
  const double denom = 1.0 - 0.5 * params.T * ss.slope;
  if (std::abs(denom) < 1e-10) {
    throw Error(ErrorKind::TransversalityViolation,
                "compensator output grazes the carrier (1 - T*slope/2 = " + std::to_string(denom) +
                    ")");
  }
  return 1.0 / denom;
}

Matrix5 monodromy_matrix(const Model& model, double a, double kappa) {
  const auto& p = model.params();
  Matrix5 jump = Matrix5::Identity();
  jump.row(4) += (p.T * kappa / p.lc()) * model.gamma();
  return model.matrix_exp((1.0 - a) * p.T) * jump * model.matrix_exp(a * p.T);
}

namespace {

// Diagonal similarity with power-of-two factors that equalises row and column norms.
// Entries of the period maps span ~30 decades; without this the QR iteration returns
// eigenvalues wrong in the second digit.
Matrix5 balanced(const Matrix5& m) {
  Matrix5 a = m;
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool changed = false;
    for (int i = 0; i < 5; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (int j = 0; j < 5; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      while (c < r / 2) {
        c *= 2;
        r /= 2;
        f *= 2;
      }
      while (c >= r * 2) {
        c /= 2;
        r *= 2;
        f /= 2;
      }
      if ((c + r) < 0.95 * s) {
        changed = true;
        a.col(i) *= f;
        a.row(i) /= f;
      }
    }
    if (!changed) break;
  }
  return a;
}

}  // namespace

Spectrum sorted_eigenvalues(const Matrix5& m) {
  Eigen::EigenSolver<Matrix5> solver(balanced(m), false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "eigenvalue iteration did not converge");
  }
  Spectrum out;
  for (int j = 0; j < 5; ++j) out[j] = solver.eigenvalues()(j);
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    return x.imag() > y.imag();
  });
  return out;
}

namespace {

StabilityReport report_for(const Model& model, double u0, double a, double kappa) {
  StabilityReport r;
  r.u0 = u0;
  r.kappa = kappa;
  r.monodromy = monodromy_matrix(model, a, kappa);
  r.eigenvalues = sorted_eigenvalues(r.monodromy);
  r.spectral_radius = std::abs(r.eigenvalues[0]);
  r.stable = r.spectral_radius < 1.0;
  return r;
}

double spectral_radius_at(const AmplifierParams& params, double u0) {
  const Model model(params);
  return monodromy(model, u0).spectral_radius;
}

}  // namespace

StabilityReport monodromy(const Model& model, double u0) {
  const SteadyState ss = solve_steady_state(model, u0);
  return report_for(model, u0, ss.a, compute_kappa(model.params(), ss));
}

StabilityReport monodromy(const Model& model, double u0, double kappa) {
  return report_for(model, u0, duty_cycle(u0), kappa);
}

Complex sylvester_residual(const Model& model, double kappa, Complex mu) {
  const auto& p = model.params();
  const auto& modes = model.modes();
  Complex sum = 0.0;
  for (int j = 0; j < 5; ++j) {
    const Complex e = std::exp(modes.lambda[j] * p.T);
    if (std::abs(mu - e) < 1e-12) {
      throw Error(ErrorKind::Pole, "candidate coincides with e^{lambda_" + std::to_string(j) + " T}");
    }
    sum += model.modal_gamma()(j) * (e / (e - mu)) * model.modal_e5()(j);
  }
  return 1.0 + (p.T * kappa / p.lc()) * sum;
}

Complex sylvester_residual_at_input(const Model& model, double u0, Complex mu) {
  const SteadyState ss = solve_steady_state(model, u0);
  return sylvester_residual(model, compute_kappa(model.params(), ss), mu);
}

double stability_threshold(const AmplifierParams& base, double u0, std::string_view name,
                           double lo, double hi, double tol) {
  if (!AmplifierParams::is_sweepable(name)) {
    throw Error(ErrorKind::InvalidParameter, "unknown sweep parameter '" + std::string(name) + "'");
  }
  if (!(lo < hi)) {
    throw Error(ErrorKind::InvalidParameter, "threshold bracket needs lo < hi");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "threshold tolerance must be positive");
  }
  auto excess = [&](double value) {
    AmplifierParams p = base;
    p.set(name, value);
    return spectral_radius_at(p, u0) - 1.0;
  };
  const double f_lo = excess(lo);
  const double f_hi = excess(hi);
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw Error(ErrorKind::NoSignChange,
                "bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "] is not stable-to-unstable");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<Spectrum> track_eigenvalues(const std::vector<Spectrum>& spectra) {
  std::vector<Spectrum> out;
  out.reserve(spectra.size());
  for (const Spectrum& s : spectra) {
    if (out.empty()) {
      out.push_back(s);
      continue;
    }
    const Spectrum& prev = out.back();
    std::array<int, 5> perm;
    std::iota(perm.begin(), perm.end(), 0);
    std::array<int, 5> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (int j = 0; j < 5; ++j) cost += std::abs(s[perm[j]] - prev[j]);
      if (cost < best_cost) {
        best_cost = cost;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    Spectrum next;
    for (int j = 0; j < 5; ++j) next[j] = s[best[j]];
    out.push_back(next);
  }
  return out;
}

}  // namespace classd
