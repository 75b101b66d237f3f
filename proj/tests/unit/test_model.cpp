#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"

using namespace classd;

namespace {

double rel_err(const StateVector& a, const StateVector& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

TEST(Params, DefaultValues) {
  const auto p = AmplifierParams::defaults();
  EXPECT_EQ(p.R, 8.0);
  EXPECT_EQ(p.L, 10e-6);
  EXPECT_EQ(p.C, 0.5169e-6);
  EXPECT_EQ(p.T, 1.0 / 384000.0);
  EXPECT_EQ(p.c1, 1.3318e5);
  EXPECT_EQ(p.c2, 1.3763e10);
  EXPECT_EQ(p.c3, -1.0747e14);
  EXPECT_EQ(p.omega1, 1.3195e5);
  EXPECT_EQ(p.k, 0);
  EXPECT_NO_THROW(p.validate());
}

TEST(Params, ValidationNamesField) {
  auto p = AmplifierParams::defaults();
  p.k = 2;
  try {
    p.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    EXPECT_NE(std::string(e.what()).find("k"), std::string::npos);
  }
  p = AmplifierParams::defaults();
  p.R = -1.0;
  EXPECT_THROW(p.validate(), Error);
  p = AmplifierParams::defaults();
  p.R = 1.0;  // 1/(2RC) above 1/sqrt(LC): overdamped filter
  EXPECT_THROW(p.validate(), Error);
}

TEST(Params, NamedAccess) {
  auto p = AmplifierParams::defaults();
  p.set("c1", 2.0e5);
  EXPECT_EQ(p.get("c1"), 2.0e5);
  EXPECT_TRUE(AmplifierParams::is_sweepable("omega1"));
  EXPECT_FALSE(AmplifierParams::is_sweepable("zeta"));
  EXPECT_THROW(p.set("zeta", 1.0), Error);
}

TEST(Model, SystemMatrixEntries) {
  const auto p = AmplifierParams::defaults();
  const Matrix5 n = build_system_matrix(p);
  EXPECT_EQ(n(0, 3), -1.0);
  EXPECT_EQ(n(1, 0), 1.0);
  EXPECT_EQ(n(1, 2), -p.omega1 * p.omega1);
  EXPECT_EQ(n(2, 1), 1.0);
  EXPECT_EQ(n(3, 4), 1.0);
  EXPECT_EQ(n(4, 3), -1.0 / p.lc());
  EXPECT_EQ(n(4, 4), -1.0 / p.rc());
  EXPECT_EQ(n.cwiseAbs().cwiseSign().sum(), 7.0);
}

TEST(Model, EigenpairsAndBiorthogonality) {
  const auto p = AmplifierParams::defaults();
  const Model model(p);
  const auto& md = model.modes();
  const CMatrix5 n = model.system_matrix().cast<Complex>();
  for (int j = 0; j < 5; ++j) {
    const CVector5 r = md.right.col(j);
    const CVector5 res = n * r - md.lambda[j] * r;
    EXPECT_LT(res.norm(), 1e-9 * (n.norm() * r.norm())) << j;
  }
  // Entrywise against |R||L|, the scale that rounding in R L actually sees.
  const CMatrix5 id = md.right * md.left;
  const Matrix5 scale = md.right.cwiseAbs() * md.left.cwiseAbs();
  EXPECT_LT((id - CMatrix5::Identity()).cwiseAbs().cwiseQuotient(scale).maxCoeff(), 1e-12);
  // Row 0 of the left matrix is v1.
  const RowVector5 v1 = model.v1();
  for (int c = 0; c < 5; ++c) {
    EXPECT_NEAR(md.left(0, c).real(), v1(c), 1e-9 * std::max(1.0, std::abs(v1(c))));
    EXPECT_NEAR(md.left(0, c).imag(), 0.0, 1e-9 * std::max(1.0, std::abs(v1(c))));
  }
  EXPECT_NEAR((v1 * model.w1())(0), 1.0, 1e-15);
}

TEST(Model, EigenvaluesMatchDenseSolver) {
  const auto p = AmplifierParams::defaults(1);
  const Model model(p);
  const auto dense = sorted_eigenvalues(model.system_matrix());
  std::array<Complex, 5> ours = model.modes().lambda;
  std::sort(ours.begin(), ours.end(), [](Complex a, Complex b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return a.imag() > b.imag();
  });
  for (int j = 0; j < 5; ++j) EXPECT_LT(std::abs(ours[j] - dense[j]), 1e-6 * std::abs(dense[0]));
}

TEST(Model, DegenerateSpectrum) {
  auto p = AmplifierParams::defaults();
  // Resonator removed: +-i w1 collapse onto the zero eigenvalue.
  p.omega1 = 0.0;
  EXPECT_THROW(modal_decomposition(p), Error);
}

TEST(Model, MatrixExpAgainstPade) {
  for (int k : {0, 1}) {
    const auto p = AmplifierParams::defaults(k);
    const Model model(p);
    for (double t : {0.0, 0.3 * p.T, p.T, 7.5 * p.T}) {
      const Matrix5 a = model.matrix_exp(t);
      const Matrix5 b = oracle::expm(model.system_matrix(), t);
      // Rounding scale of the modal sum for each entry.
      const auto& md = model.modes();
      CVector5 e;
      for (int j = 0; j < 5; ++j) e(j) = std::exp(md.lambda[j] * t);
      const Matrix5 modal_scale =
          md.right.cwiseAbs() * e.cwiseAbs().asDiagonal() * md.left.cwiseAbs();
      for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
          const double scale = std::max(std::abs(b(r, c)), 1e-4 * modal_scale(r, c));
          EXPECT_NEAR(a(r, c), b(r, c), 1e-8 * scale + 1e-300) << r << "," << c << " t=" << t;
        }
      }
    }
  }
}

TEST(Model, MatrixExpIdentities) {
  const Model model(AmplifierParams::defaults());
  const double t = model.params().T;
  const auto& md = model.modes();
  const Matrix5 scale = md.right.cwiseAbs() * md.left.cwiseAbs();
  EXPECT_LT((model.matrix_exp(0.0) - Matrix5::Identity()).cwiseAbs().cwiseQuotient(scale).maxCoeff(),
            1e-14);
  const Matrix5 twice = model.matrix_exp(t) * model.matrix_exp(t);
  const Matrix5 once = model.matrix_exp(2 * t);
  EXPECT_LT((twice - once).norm(), 1e-10 * once.norm());
}

TEST(Model, PhiMatchesQuadrature) {
  const double w1 = 1.3195e5;
  const double t_max = 1.0 / 384000.0;
  for (int n = -1; n <= 5; ++n) {
    for (double t : {0.01 * t_max, 0.5 * t_max, t_max, 40 * t_max, 200 * t_max}) {
      const double a = phi(n, t, w1);
      const double b = oracle::phi(n, t, w1);
      EXPECT_NEAR(a, b, 1e-9 * std::abs(b) + 1e-300) << "n=" << n << " t=" << t;
    }
  }
}

TEST(Model, PhiBranchContinuity) {
  const double w1 = 1.3195e5;
  const double t_switch = 4.0 / w1;
  for (int n = 0; n <= 6; ++n) {
    const double below = phi(n, t_switch * (1 - 1e-12), w1);
    const double above = phi(n, t_switch * (1 + 1e-12), w1);
    EXPECT_NEAR(below, above, 1e-9 * std::abs(below)) << n;
  }
}

TEST(Model, EtaMatchesQuadrature) {
  const auto p = AmplifierParams::defaults();
  const auto md = modal_decomposition(p);
  for (int n = 0; n <= 4; ++n) {
    for (int j = 0; j < 5; ++j) {
      for (double t : {0.1 * p.T, p.T, 30 * p.T}) {
        const Complex a = eta(n, md.lambda[j], t);
        const Complex b = oracle::eta(n, md.lambda[j], t);
        EXPECT_LT(std::abs(a - b), 1e-9 * std::abs(b)) << n << " " << j << " " << t;
      }
    }
  }
}

TEST(Model, OrderOutOfRange) {
  EXPECT_THROW(phi(kMaxIntegralOrder + 1, 1e-6, 1e5), Error);
  EXPECT_THROW(phi(-2, 1e-6, 1e5), Error);
  EXPECT_THROW(eta(-1, Complex(1.0, 0.0), 1e-6), Error);
  try {
    eta(kMaxIntegralOrder + 1, Complex(1.0, 0.0), 1e-6);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedOrder);
  }
}

TEST(Model, PnQnAgainstQuadrature) {
  for (int k : {0, 1}) {
    const auto p = AmplifierParams::defaults(k);
    const Model model(p);
    for (int n = 0; n <= 3; ++n) {
      for (double t : {0.37 * p.T, p.T, 1.8 * p.T}) {
        EXPECT_LT(rel_err(model.p_vec(n, t), oracle::p_vec(p, n, t)), 1e-9) << n;
        EXPECT_LT(rel_err(model.q_vec(n, t), oracle::q_vec(p, n, t)), 1e-9) << n;
      }
    }
  }
}

TEST(Model, PnQnDifferentiation) {
  // d/dt P_n = P_{n-1}, d/dt Q_n = Q_{n-1}.
  const auto p = AmplifierParams::defaults();
  const Model model(p);
  const double t = 0.6 * p.T;
  const double h = 1e-6 * p.T;
  for (int n = 1; n <= 4; ++n) {
    const StateVector dq = (model.q_vec(n, t + h) - model.q_vec(n, t - h)) / (2 * h);
    EXPECT_LT(rel_err(dq, model.q_vec(n - 1, t)), 1e-6) << n;
    const StateVector dp = (model.p_vec(n, t + h) - model.p_vec(n, t - h)) / (2 * h);
    EXPECT_LT(rel_err(dp, model.p_vec(n - 1, t)), 1e-6) << n;
  }
}

TEST(Model, LeftNullVectorIdentities) {
  // v1 N = 0 turns v1 P_n and v1 Q_n into polynomials in t.
  for (int k : {0, 1}) {
    const auto p = AmplifierParams::defaults(k);
    const Model model(p);
    const RowVector5 v1 = model.v1();
    for (int n = 0; n <= 4; ++n) {
      for (int i = 1; i <= 20; ++i) {
        const double t = 2.0 * p.T * i / 20.0;
        const double fact = std::tgamma(n + 1.0);
        const double expect_p = -std::pow(t, n) / fact / p.lc();
        const double expect_q = std::pow(t, n) / fact;
        EXPECT_NEAR((v1 * model.p_vec(n, t))(0), expect_p, 1e-10 * std::abs(expect_p));
        EXPECT_NEAR((v1 * model.q_vec(n, t))(0), expect_q, 1e-10 * std::abs(expect_q));
      }
    }
  }
}

TEST(Model, NormalizationIndependence) {
  const auto p = AmplifierParams::defaults();
  const Model a(p);
  const std::array<Complex, 5> scale{Complex(3.0, 0.0), Complex(0.2, 1.5), Complex(0.2, -1.5),
                                     Complex(-7.0, 2.0), Complex(-7.0, -2.0)};
  const Model b(p, a.modes().rescaled(scale));
  EXPECT_LT(rel_err(a.q_vec(2, p.T), b.q_vec(2, p.T)), 1e-12);
  EXPECT_LT((a.matrix_exp(p.T) - b.matrix_exp(p.T)).norm(), 1e-12 * a.matrix_exp(p.T).norm());
}

TEST(Model, ResidueCheck) {
  EXPECT_EQ(checked_real(Complex(2.0, 1e-12), 1.0, "x"), 2.0);
  EXPECT_THROW(checked_real(Complex(2.0, 1e-3), 1.0, "x"), Error);
}

TEST(Propagation, MatchesDenseExpmAndQuadrature) {
  for (int k : {0, 1}) {
    const auto p = AmplifierParams::defaults(k);
    const Model model(p);
    StateVector x0;
    x0 << 1e-6, 2e-2, -3e-8, 0.4, 1.2e4;
    SegmentForcing f;
    f.level = 0.7;
    f.ramp = 2.0 * k / p.T;
    f.input = {0.3, 500.0, -2e6, 0.0, 0.0};
    const double dt = 0.45 * p.T;
    StateVector expect = oracle::expm(model.system_matrix(), dt) * x0 +
                         (f.level * oracle::q_vec(p, 1, dt) + f.ramp * oracle::q_vec(p, 2, dt)) / p.lc();
    for (int d = 0; d < 3; ++d) expect += oracle::p_vec(p, d + 1, dt) * f.input[d];
    EXPECT_LT(rel_err(propagate(model, x0, dt, f), expect), 1e-9);
    const SegmentPropagator seg(model, x0, f);
    EXPECT_NEAR(seg.output(dt), (model.gamma() * expect)(0),
                1e-9 * std::abs((model.gamma() * expect)(0)));
  }
}

TEST(Propagation, MatchesRk4WithSineInput) {
  const auto p = AmplifierParams::defaults(1);
  const Model model(p);
  const double w = 2 * std::numbers::pi * 2000.0;
  auto u = [w](double t) { return 0.6 * std::sin(w * t); };
  const double t0 = 3.0 * p.T;
  const double dt = 0.8 * p.T;
  StateVector x0;
  x0 << 4e-6, 0.0, 0.0, 0.5, 7e4;
  SegmentForcing f;
  f.level = 1.0 + p.k * -1.0;
  f.ramp = 2.0 * p.k / p.T;
  for (int d = 0; d <= kInputDerivatives; ++d) {
    f.input[d] = 0.6 * std::pow(w, d) * std::sin(w * t0 + d * std::numbers::pi / 2);
  }
  const StateVector a = propagate(model, x0, dt, f);
  const StateVector b = oracle::rk4(p, x0, t0, dt, 1.0, u, 100000);
  for (int r = 0; r < 5; ++r) EXPECT_NEAR(a(r), b(r), 1e-6 * std::abs(b(r)) + 1e-12 * b.norm()) << r;
}
