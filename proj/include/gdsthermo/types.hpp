#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace gdsthermo {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kDefaultTol = 1e-9;

} // namespace gdsthermo
