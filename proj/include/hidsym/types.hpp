#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace hidsym {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat7 = Eigen::Matrix<double, 7, 7>;
/// Rows are the spacelike indices i = 1..3, columns spacetime indices.
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat43 = Eigen::Matrix<double, 4, 3>;
/// Row lambda, column a over the 7 phase coordinates.
using Mat47 = Eigen::Matrix<double, 4, 7>;

/// d[rho](l, m) = partial_rho of a 4x4 component array.
using MetricDerivative = std::array<Mat4, 4>;

/// Number of phase coordinates (x^0..x^3, x^1_0..x^3_0).
inline constexpr int kPhaseDim = 7;

}  // namespace hidsym
