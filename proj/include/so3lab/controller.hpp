#pragma once

#include <optional>
#include <variant>

#include "so3lab/attitude_error.hpp"
#include "so3lab/gain.hpp"
#include "so3lab/rigid_body.hpp"

namespace so3lab {

/// One Euler angle as an analytic function of time:
///   Constant: c
///   Sine:     a sin(b t) + c
///   Cosine:   a cos(b t) + c
struct AngleProfile {
  enum class Kind { Constant, Sine, Cosine };
  Kind kind = Kind::Constant;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static AngleProfile constant(double c) { return {Kind::Constant, 0.0, 0.0, c}; }
  static AngleProfile sine(double a, double b, double c = 0.0) { return {Kind::Sine, a, b, c}; }
  static AngleProfile cosine(double a, double b, double c = 0.0) { return {Kind::Cosine, a, b, c}; }

  double value(double t) const;
  double rate(double t) const;
  double acceleration(double t) const;
};

struct Setpoint {
  Rotation R_d;
};

/// R_d(t) = Rz(yaw(t)) Ry(pitch(t)) Rx(roll(t))
struct Euler321Trajectory {
  AngleProfile yaw;
  AngleProfile pitch;
  AngleProfile roll;
};

using DesiredTrajectory = std::variant<Setpoint, Euler321Trajectory>;

struct DesiredState {
  Rotation R_d;
  Vec3 Omega_d = Vec3::Zero();
  Vec3 Omega_d_dot = Vec3::Zero();
};

/// R_d, Omega_d = (R_d^T R_d')^vee and its time derivative, all analytic.
DesiredState evaluate_desired(const DesiredTrajectory& traj, double t);

/// sup ||Omega_d(t)|| over [0, horizon], sampled every dt.
double max_desired_rate(const DesiredTrajectory& traj, double horizon, double dt);

struct ControllerGains {
  Gain k_R;
  Gain k_Omega;
};

struct TrackingErrors {
  Rotation Q;  ///< R^T R_d
  double Psi = 0.0;
  Vec3 e_R = Vec3::Zero();
  /// Omega - Q Omega_d; needs the true angular velocity.
  std::optional<Vec3> e_Omega;
  /// Omega_bar - Q Omega_d; needs the observer estimate.
  std::optional<Vec3> e_Omega_bar;
};

/// Full tracking errors from the true body state, with the estimated error
/// when an estimate Omega_bar (body frame) is supplied.
TrackingErrors compute_tracking_errors(const WeightMatrix& g, const RigidBodyState& body,
                                       const DesiredState& desired,
                                       const std::optional<Vec3>& omega_bar_body = std::nullopt);

/// Tracking errors available to a velocity-free controller: attitude plus the
/// estimate only. e_Omega is left empty.
TrackingErrors compute_estimated_tracking_errors(const WeightMatrix& g, const Rotation& r,
                                                 const Vec3& omega_bar_body, const DesiredState& desired);

/// chi = J0 e_Omega + (2 J0 - tr[J0] I) Q Omega_d
Vec3 chi_vector(const InertiaSpec& j0, const Vec3& e_Omega, const Rotation& q, const Vec3& Omega_d);

/// B1* = max_i |2 lambda_i - tr J0| * Omega_max, so that
/// ||(2 J0 - tr[J0] I) Q Omega_d|| <= B1* whenever ||Omega_d|| <= Omega_max.
double chi_offset_bound(const InertiaSpec& j0, double omega_max);

/// u = -k_R e_R - k_Omega e_Omega + J0 Q Omega_d' + hat(Q Omega_d) J0 Q Omega_d.
/// Throws MissingEstimate if errors.e_Omega is empty.
Vec3 pd_control(const InertiaSpec& j0, const ControllerGains& gains, const TrackingErrors& errors,
                const DesiredState& desired);

/// Same law with the estimated velocity error in place of e_Omega. Never reads
/// errors.e_Omega. Throws MissingEstimate if errors.e_Omega_bar is empty.
Vec3 velocity_free_control(const InertiaSpec& j0, const ControllerGains& gains,
                           const TrackingErrors& errors, const DesiredState& desired);

}  // namespace so3lab
