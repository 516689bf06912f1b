#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qjumps {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex I_UNIT{0.0, 1.0};

}  // namespace qjumps
