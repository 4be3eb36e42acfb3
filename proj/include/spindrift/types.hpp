#pragma once

#include <complex>
#include <Eigen/Dense>

namespace spindrift {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using CVec2 = Eigen::Vector2cd;
using CVec3 = Eigen::Vector3cd;
using CVec4 = Eigen::Vector4cd;
using CMat2 = Eigen::Matrix2cd;
using CMat4 = Eigen::Matrix4cd;

inline constexpr Complex I{0.0, 1.0};

// Dimensionless units used throughout: lengths in c/w, times in 1/w,
// velocities in c, masses in the electron mass, field amplitudes in
// m*c*w/q.  The photon-to-rest-energy ratio chi = hbar*w/(m c^2) is the
// single quantum scale; mu_B*lambda = (chi/2)*lambda_hat * m c^2.
struct SpacetimePoint {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
};

// Minkowski contraction of two covariant 4-vectors, signature (+,-,-,-).
template <typename S>
inline S minkowski_dot(const Eigen::Matrix<S, 4, 1>& a,
                       const Eigen::Matrix<S, 4, 1>& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

}  // namespace spindrift
