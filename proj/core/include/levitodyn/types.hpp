#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace levitodyn {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace levitodyn
