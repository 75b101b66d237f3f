#pragma once

#include <complex>

#include <Eigen/Dense>

namespace classd {

using Complex = std::complex<double>;

/// State x = (m1, m2, m3, f, f') of the compensator + output filter.
using StateVector = Eigen::Matrix<double, 5, 1>;
using RowVector5 = Eigen::Matrix<double, 1, 5>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

using CVector5 = Eigen::Matrix<Complex, 5, 1>;
using CRowVector5 = Eigen::Matrix<Complex, 1, 5>;
using CMatrix5 = Eigen::Matrix<Complex, 5, 5>;

inline constexpr int kStateDim = 5;

}  // namespace classd
