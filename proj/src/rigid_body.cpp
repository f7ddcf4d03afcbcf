#include "so3lab/rigid_body.hpp"

#include <cmath>

#include "so3lab/errors.hpp"

namespace so3lab {

InertiaSpec::InertiaSpec(const Mat3& j0) : j0_(j0) {
  if (!j0.allFinite()) throw InvalidInertia("inertia has non-finite entries");
  if ((j0 - j0.transpose()).norm() > 1e-12) throw InvalidInertia("inertia must be symmetric");
  eig_ = symmetric_eigenvalues(j0);
  if (eig_[0] <= 0.0) throw InvalidInertia("inertia must be positive definite");
  j0_inv_ = j0.inverse();
}

InertiaSpec InertiaSpec::diagonal(double j1, double j2, double j3) {
  return InertiaSpec(Vec3(j1, j2, j3).asDiagonal());
}

Mat3 InertiaSpec::inertial(const Rotation& r) const {
  return r.matrix() * j0_ * r.matrix().transpose();
}

BodyDerivative body_frame_derivative(const InertiaSpec& j0, const RigidBodyState& s, const Vec3& u) {
  const Vec3& w = s.Omega;
  return {w, j0.inverse() * (u - w.cross(j0.matrix() * w))};
}

Vec3 inertial_velocity_from_momentum(const InertiaSpec& j0, const Rotation& r, const Vec3& p) {
  const Mat3 j = j0.inertial(r);
  const double det = j.determinant();
  const double lm = j0.lambda_max();
  if (!(std::abs(det) > 1e-14 * lm * lm * lm)) throw SingularInertia("inertial inertia is singular");
  return r * (j0.inverse() * (r.matrix().transpose() * p));
}

InertialDerivative inertial_frame_derivative(const InertiaSpec& j0, const Rotation& r, const Vec3& p,
                                             const Vec3& tau) {
  return {inertial_velocity_from_momentum(j0, r, p), tau};
}

}  // namespace so3lab
