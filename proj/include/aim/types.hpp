#pragma once

#include <Eigen/Dense>
#include <complex>

namespace aim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

template <typename T>
using ArrayXX = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using ArrayXXc = Eigen::Array<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using MatrixXc = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using VectorXc = Eigen::Vector<std::complex<T>, Eigen::Dynamic>;

using ArrayXXi = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

template <typename T>
inline T wavelength(T frequency_hz) {
  return static_cast<T>(kSpeedOfLight) / frequency_hz;
}

}  // namespace aim
