#pragma once

#include <complex>

#include <Eigen/Dense>

namespace l1dom {

using Complex = std::complex<double>;

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Numeric rank rule shared by every module: smallest singular value must
// exceed this fraction of the largest.
inline constexpr double kRankTolerance = 1e-10;

}  // namespace l1dom
