#pragma once

#include "so3lab/so3.hpp"

namespace so3lab {

/// Body-frame inertia J0 (kg m^2), symmetric positive definite.
class InertiaSpec {
 public:
  explicit InertiaSpec(const Mat3& j0);
  static InertiaSpec diagonal(double j1, double j2, double j3);

  const Mat3& matrix() const { return j0_; }
  const Mat3& inverse() const { return j0_inv_; }
  double lambda_min() const { return eig_[0]; }
  double lambda_max() const { return eig_[2]; }
  const std::array<double, 3>& eigenvalues() const { return eig_; }

  /// Inertial-frame inertia J = R J0 R^T.
  Mat3 inertial(const Rotation& r) const;

 private:
  Mat3 j0_;
  Mat3 j0_inv_;
  std::array<double, 3> eig_;
};

/// Attitude R (body to inertial) and body angular velocity Omega (rad/s).
struct RigidBodyState {
  Rotation R;
  Vec3 Omega = Vec3::Zero();

  Vec3 inertial_velocity() const { return R * Omega; }
  /// p = J omega = R J0 Omega
  Vec3 inertial_momentum(const InertiaSpec& j0) const { return R * (j0.matrix() * Omega); }
};

/// Body-frame form: R' = R hat(Omega), J0 Omega' = u - Omega x J0 Omega.
struct BodyDerivative {
  Vec3 attitude_tangent;  ///< Omega, right-trivialized
  Vec3 Omega_dot;
};

BodyDerivative body_frame_derivative(const InertiaSpec& j0, const RigidBodyState& s, const Vec3& u);

/// Inertial-frame form: d/dt(J omega) = tau, R' = hat(omega) R with omega = J^{-1} p.
struct InertialDerivative {
  Vec3 attitude_tangent;  ///< omega, left-trivialized
  Vec3 p_dot;
};

InertialDerivative inertial_frame_derivative(const InertiaSpec& j0, const Rotation& r, const Vec3& p,
                                             const Vec3& tau);

/// J^{-1} p computed as R J0^{-1} R^T p. Throws SingularInertia if the inertial
/// inertia is numerically singular.
Vec3 inertial_velocity_from_momentum(const InertiaSpec& j0, const Rotation& r, const Vec3& p);

}  // namespace so3lab
