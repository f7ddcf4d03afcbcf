#pragma once

#include <Eigen/Dense>
#include <array>

namespace so3lab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Default tolerance on ||R^T R - I|| and |det R - 1| for a matrix to count as a rotation.
inline constexpr double kRotationTolerance = 1e-9;
/// Default tolerance on the symmetric part accepted by vee().
inline constexpr double kSkewTolerance = 1e-9;
/// Below this angle exp_so3 switches to its Taylor expansion.
inline constexpr double kSmallAngle = 1e-8;

Mat3 hat(const Vec3& v);

/// Inverse of hat(). Throws NotSkewSymmetric if the symmetric part of m exceeds tol
/// (Frobenius norm). Otherwise returns the vector of the skew part of m.
Vec3 vee(const Mat3& m, double tol = kSkewTolerance);

/// Distance of m from the orthogonal group, ||m^T m - I||_F.
double orthogonality_residual(const Mat3& m);

/// An element of SO(3). The invariants are checked on construction from a raw
/// matrix; group operations between valid rotations skip the check.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m, double tol = kRotationTolerance);

  static Rotation identity() { return Rotation(); }
  /// Wraps m without validation. Intended for products of rotations that are
  /// closed under the group law up to round-off.
  static Rotation from_trusted(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return from_trusted(m_.transpose()); }
  double trace() const { return m_.trace(); }

  Rotation operator*(const Rotation& other) const { return from_trusted(m_ * other.m_); }
  /// Product with any 3-row Eigen expression (vectors or matrices).
  template <class Derived>
  Eigen::Matrix<double, 3, Derived::ColsAtCompileTime> operator*(const Eigen::MatrixBase<Derived>& a) const {
    return m_ * a;
  }

  double residual() const { return orthogonality_residual(m_); }

 private:
  struct Trusted {};
  Rotation(const Mat3& m, Trusted) : m_(m) {}
  Mat3 m_;
};

/// Rodrigues formula. exp_so3(0) = I.
Rotation exp_so3(const Vec3& v);

/// Orthogonal polar factor of m, the nearest rotation in Frobenius norm.
/// Throws DegenerateMatrix if det(m) <= 0 or m is numerically rank deficient.
Rotation project_to_rotation(const Mat3& m);

/// R = Rz(yaw) * Ry(pitch) * Rx(roll).
Rotation euler321_rotation(double yaw, double pitch, double roll);

/// Eigenvalues of a symmetric 3x3 matrix in ascending order.
std::array<double, 3> symmetric_eigenvalues(const Mat3& s);

/// Spectral (2-)norm: square root of the largest eigenvalue of m^T m.
double spectral_norm(const Mat3& m);

/// The undesired observer equilibria D1 = diag(1,-1,-1), D2, D3. index in {1,2,3}.
Rotation undesired_equilibrium(int index);

}  // namespace so3lab
