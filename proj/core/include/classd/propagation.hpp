#pragma once

#include <array>

#include "classd/model.hpp"

namespace classd {

/// Highest input derivative kept in the Taylor treatment of u(t) over a segment.
inline constexpr int kInputDerivatives = 4;

/// Forcing over one switching segment [t0, t0 + dt].
///
/// The filter drive g + k v is affine in time on a segment: `level` at the segment start
/// plus `ramp` per second. The input enters through u and its derivatives at t0.
struct SegmentForcing {
  double level = 0.0;
  double ramp = 0.0;
  std::array<double, kInputDerivatives + 1> input{};
};

/// x(t0 + dt) = e^{N dt} x0 + sum_j P_{j+1}(dt) u^{(j)}(t0) + (level Q1(dt) + ramp Q2(dt)) / LC.
StateVector propagate(const Model& model, const StateVector& x0, double dt,
                      const SegmentForcing& forcing);

/// Repeated evaluation of one segment at many offsets, as needed by root finding.
/// Caches the modal coordinates of x0 and of the drive.
class SegmentPropagator {
 public:
  SegmentPropagator(const Model& model, const StateVector& x0, const SegmentForcing& forcing);

  StateVector state(double s) const;
  /// Compensator output m = gamma^T x at offset s.
  double output(double s) const;

 private:
  const Model* model_;
  SegmentForcing forcing_;
  CVector5 modal_x0_;
  CVector5 modal_level_;
  CVector5 modal_ramp_;
};

}  // namespace classd
