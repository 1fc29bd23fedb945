#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace mosm {

using cdouble = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;
inline constexpr cdouble kI{0.0, 1.0};

// a × b without conjugation. Eigen's cross() conjugates the result for
// complex scalars, which is not the curl-algebra product.
inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return CVec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 2.99792458e8;

}  // namespace mosm
