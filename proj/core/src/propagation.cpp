#include "classd/propagation.hpp"

#include <cmath>

namespace classd {

StateVector propagate(const Model& model, const StateVector& x0, double dt,
                      const SegmentForcing& forcing) {
  return SegmentPropagator(model, x0, forcing).state(dt);
}

SegmentPropagator::SegmentPropagator(const Model& model, const StateVector& x0,
                                     const SegmentForcing& forcing)
    : model_(&model), forcing_(forcing) {
  const double inv_lc = 1.0 / model.params().lc();
  modal_x0_ = model.modes().left * x0.cast<Complex>();
  modal_level_ = model.modal_e5() * (forcing.level * inv_lc);
  modal_ramp_ = model.modal_e5() * (forcing.ramp * inv_lc);
}

StateVector SegmentPropagator::state(double s) const {
  const auto& modes = model_->modes();
  CVector5 coeff;
  for (int j = 0; j < 5; ++j) {
    const Complex l = modes.lambda[j];
    coeff(j) = std::exp(l * s) * modal_x0_(j) + eta(1, l, s) * modal_level_(j) +
               eta(2, l, s) * modal_ramp_(j);
  }
  StateVector x = model_->modal_apply(coeff, CVector5::Ones());
  for (int d = 0; d <= kInputDerivatives; ++d) {
    if (forcing_.input[d] != 0.0) x += model_->p_vec(d + 1, s) * forcing_.input[d];
  }
  return x;
}

double SegmentPropagator::output(double s) const {
  const auto& modes = model_->modes();
  const auto& g = model_->modal_gamma();
  Complex modal = 0.0;
  double scale = 0.0;
  for (int j = 0; j < 5; ++j) {
    const Complex l = modes.lambda[j];
    const Complex c = std::exp(l * s) * modal_x0_(j) + eta(1, l, s) * modal_level_(j) +
                      eta(2, l, s) * modal_ramp_(j);
    modal += g(j) * c;
    scale += std::abs(g(j) * c);
  }
  double m = checked_real(modal, scale, "segment output");
  const auto& p = model_->params();
  for (int d = 0; d <= kInputDerivatives; ++d) {
    const double u = forcing_.input[d];
    if (u == 0.0) continue;
    const StateVector pv = model_->p_vec(d + 1, s);
    m += u * (p.c1 * pv(0) + p.c2 * pv(1) + p.c3 * pv(2));
  }
  return m;
}

}  // namespace classd
