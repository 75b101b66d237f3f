#include "classd/steady_state.hpp"

#include <array>
#include <cmath>
#include <string>

#include "classd/error.hpp"

namespace classd {
namespace {

constexpr double kMaxCondition = 1e12;

}  // namespace

double duty_cycle(double u0) {
  if (!(std::abs(u0) <= 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "input u0 must satisfy |u0| <= 1");
  }
  return 0.5 * (1.0 + u0);
}

StateVector periodic_forcing(const Model& model, double u0, double a) {
  const auto& p = model.params();
  const double k = p.k;
  const double t = p.T;
  StateVector filter = 2.0 * (1.0 - k) * model.q_vec(1, a * t) +
                       (-1.0 - k + 2.0 * k * a) * model.q_vec(1, t) +
                       (2.0 * k / t) * model.q_vec(2, t);
  return u0 * model.p_vec(1, t) + filter / p.lc();
}

SteadyState solve_steady_state(const Model& model, double u0) {
  if (!(std::abs(u0) < 1.0)) {
    throw Error(ErrorKind::InvalidParameter,
                "steady state requires |u0| < 1 (duty cycle saturates)");
  }
  const auto& p = model.params();
  SteadyState ss;
  ss.u0 = u0;
  ss.a = duty_cycle(u0);

  const Matrix5 periodicity = Matrix5::Identity() - model.matrix_exp(p.T);
  const StateVector phi = periodic_forcing(model, u0, ss.a);
  const RowVector5 gamma = model.gamma();

  // The null direction v1 of (I - e^{NT}) only involves rows 1, 4 and 5, so those are
  // the rows whose replacement restores full rank.
  double best_condition = 0.0;
  for (int row : std::array{0, 3, 4}) {
    Matrix5 m = periodicity;
    StateVector rhs = phi;
    m.row(row) = gamma;
    rhs(row) = -1.0 + 2.0 * ss.a;

    Eigen::Matrix<double, 5, 1> rs;
    Eigen::Matrix<double, 5, 1> cs;
    for (int i = 0; i < 5; ++i) rs(i) = 1.0 / m.row(i).cwiseAbs().maxCoeff();
    Matrix5 scaled = rs.asDiagonal() * m;
    for (int j = 0; j < 5; ++j) cs(j) = 1.0 / scaled.col(j).cwiseAbs().maxCoeff();
    scaled = scaled * cs.asDiagonal();

    Eigen::JacobiSVD<Matrix5> svd(scaled);
    const auto sv = svd.singularValues();
    const double condition = sv(0) / sv(4);
    best_condition = condition;
    if (!(condition < kMaxCondition)) continue;

    const StateVector y = scaled.partialPivLu().solve(rs.asDiagonal() * rhs);
    ss.x_at_switch = cs.asDiagonal() * y;
    ss.replaced_row = row;
    ss.slope = gamma * model.system_matrix() * ss.x_at_switch + p.c1 * u0;
    return ss;
  }
  throw Error(ErrorKind::SingularSystem,
              "steady-state system is singular (condition " + std::to_string(best_condition) + ")");
}

StateVector rc_shift_delta(const AmplifierParams& params, double a, double b) {
  if (params.k != 1) {
    throw Error(ErrorKind::InvalidParameter, "rc_shift_delta applies to k = 1 only");
  }
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "duty cycles a, b must lie in (0, 1)");
  }
  const double w2 = params.omega1 * params.omega1;
  const double gain = params.loop_gain_constant();
  if (gain == 0.0) {
    throw Error(ErrorKind::DivisionByZero, "c1*omega1^2 + c3 = 0");
  }
  StateVector delta;
  delta << w2, 0.0, 1.0, gain, 0.0;
  return (2.0 * (b - a) / gain) * delta;
}

SegmentForcing constant_input_forcing(const AmplifierParams& params, double u0, double g,
                                      double v_start) {
  SegmentForcing f;
  f.level = g + params.k * v_start;
  f.ramp = params.k * 2.0 / params.T;
  f.input[0] = u0;
  return f;
}

std::vector<PeriodSample> reconstruct_period(const Model& model, const SteadyState& ss,
                                             int n_samples) {
  if (n_samples < 2) {
    throw Error(ErrorKind::InvalidParameter, "n_samples must be >= 2");
  }
  const auto& p = model.params();
  const double t_switch = ss.a * p.T;
  // Falling edge to the next rising edge, then the high half of the next period.
  const SegmentPropagator low(model, ss.x_at_switch,
                              constant_input_forcing(p, ss.u0, -1.0, -1.0 + 2.0 * ss.a));
  const StateVector x_edge = low.state(p.T - t_switch);
  const SegmentPropagator high(model, x_edge, constant_input_forcing(p, ss.u0, 1.0, -1.0));

  std::vector<PeriodSample> samples;
  samples.reserve(n_samples);
  const RowVector5 gamma = model.gamma();
  for (int i = 0; i < n_samples; ++i) {
    PeriodSample s;
    s.t = t_switch + p.T * i / (n_samples - 1);
    if (s.t < p.T) {
      s.x = low.state(s.t - t_switch);
    } else {
      s.x = high.state(s.t - p.T);
    }
    s.m = gamma * s.x;
    samples.push_back(s);
  }
  return samples;
}

StateVector state_at_carrier_edge(const Model& model, const SteadyState& ss) {
  const auto& p = model.params();
  const SegmentPropagator low(model, ss.x_at_switch,
                              constant_input_forcing(p, ss.u0, -1.0, -1.0 + 2.0 * ss.a));
  return low.state((1.0 - ss.a) * p.T);
}

}  // namespace classd
