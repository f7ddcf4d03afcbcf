#include "so3lab/controller.hpp"

#include <algorithm>
#include <cmath>

#include "so3lab/errors.hpp"

namespace so3lab {

double AngleProfile::value(double t) const {
  switch (kind) {
    case Kind::Constant:
      return c;
    case Kind::Sine:
      return a * std::sin(b * t) + c;
    case Kind::Cosine:
      return a * std::cos(b * t) + c;
  }
  return c;
}

double AngleProfile::rate(double t) const {
  switch (kind) {
    case Kind::Constant:
      return 0.0;
    case Kind::Sine:
      return a * b * std::cos(b * t);
    case Kind::Cosine:
      return -a * b * std::sin(b * t);
  }
  return 0.0;
}

double AngleProfile::acceleration(double t) const {
  switch (kind) {
    case Kind::Constant:
      return 0.0;
    case Kind::Sine:
      return -a * b * b * std::sin(b * t);
    case Kind::Cosine:
      return -a * b * b * std::cos(b * t);
  }
  return 0.0;
}

namespace {

// Body angular velocity of R = Rz(yaw) Ry(pitch) Rx(roll) is M(pitch, roll) * rates
// with rates = (yaw', pitch', roll').
DesiredState evaluate_euler(const Euler321Trajectory& e, double t) {
  const double al = e.yaw.value(t), be = e.pitch.value(t), ga = e.roll.value(t);
  const Vec3 rates(e.yaw.rate(t), e.pitch.rate(t), e.roll.rate(t));
  const Vec3 accel(e.yaw.acceleration(t), e.pitch.acceleration(t), e.roll.acceleration(t));
  const double cb = std::cos(be), sb = std::sin(be), cg = std::cos(ga), sg = std::sin(ga);

  Mat3 m;
  m << -sb, 0, 1,
       cb * sg, cg, 0,
       cb * cg, -sg, 0;
  Mat3 dm_dbeta;
  dm_dbeta << -cb, 0, 0,
              -sb * sg, 0, 0,
              -sb * cg, 0, 0;
  Mat3 dm_dgamma;
  dm_dgamma << 0, 0, 0,
               cb * cg, -sg, 0,
               -cb * sg, -cg, 0;
  const Mat3 m_dot = dm_dbeta * rates.y() + dm_dgamma * rates.z();

  DesiredState d;
  d.R_d = euler321_rotation(al, be, ga);
  d.Omega_d = m * rates;
  d.Omega_d_dot = m * accel + m_dot * rates;
  return d;
}

}  // namespace

DesiredState evaluate_desired(const DesiredTrajectory& traj, double t) {
  if (const auto* sp = std::get_if<Setpoint>(&traj)) return {sp->R_d, Vec3::Zero(), Vec3::Zero()};
  return evaluate_euler(std::get<Euler321Trajectory>(traj), t);
}

double max_desired_rate(const DesiredTrajectory& traj, double horizon, double dt) {
  double best = 0.0;
  const auto n = static_cast<long>(std::ceil(horizon / dt));
  for (long i = 0; i <= n; ++i) {
    const double t = std::min(horizon, static_cast<double>(i) * dt);
    best = std::max(best, evaluate_desired(traj, t).Omega_d.norm());
  }
  return best;
}

TrackingErrors compute_tracking_errors(const WeightMatrix& g, const RigidBodyState& body,
                                       const DesiredState& desired,
                                       const std::optional<Vec3>& omega_bar_body) {
  TrackingErrors e;
  e.Q = body.R.transpose() * desired.R_d;
  e.Psi = error_function(g, e.Q);
  e.e_R = tracking_error_vector(g, e.Q);
  const Vec3 q_wd = e.Q * desired.Omega_d;
  e.e_Omega = body.Omega - q_wd;
  if (omega_bar_body) e.e_Omega_bar = *omega_bar_body - q_wd;
  return e;
}

TrackingErrors compute_estimated_tracking_errors(const WeightMatrix& g, const Rotation& r,
                                                 const Vec3& omega_bar_body, const DesiredState& desired) {
  TrackingErrors e;
  e.Q = r.transpose() * desired.R_d;
  e.Psi = error_function(g, e.Q);
  e.e_R = tracking_error_vector(g, e.Q);
  e.e_Omega_bar = omega_bar_body - e.Q * desired.Omega_d;
  return e;
}

Vec3 chi_vector(const InertiaSpec& j0, const Vec3& e_Omega, const Rotation& q, const Vec3& Omega_d) {
  const Mat3& j = j0.matrix();
  return j * e_Omega + (2.0 * j - j.trace() * Mat3::Identity()) * (q * Omega_d);
}

double chi_offset_bound(const InertiaSpec& j0, double omega_max) {
  const double tr = j0.matrix().trace();
  double worst = 0.0;
  for (double lambda : j0.eigenvalues()) worst = std::max(worst, std::abs(2.0 * lambda - tr));
  return worst * omega_max;
}

namespace {

Vec3 feedforward(const InertiaSpec& j0, const Rotation& q, const DesiredState& desired) {
  const Vec3 q_wd = q * desired.Omega_d;
  return j0.matrix() * (q * desired.Omega_d_dot) + q_wd.cross(j0.matrix() * q_wd);
}

}  // namespace

Vec3 pd_control(const InertiaSpec& j0, const ControllerGains& gains, const TrackingErrors& errors,
                const DesiredState& desired) {
  if (!errors.e_Omega) throw MissingEstimate("pd_control needs the true angular velocity error");
  return -(gains.k_R * errors.e_R) - (gains.k_Omega * *errors.e_Omega) +
         feedforward(j0, errors.Q, desired);
}

Vec3 velocity_free_control(const InertiaSpec& j0, const ControllerGains& gains,
                           const TrackingErrors& errors, const DesiredState& desired) {
  if (!errors.e_Omega_bar) throw MissingEstimate("velocity_free_control needs an observer estimate");
  return -(gains.k_R * errors.e_R) - (gains.k_Omega * *errors.e_Omega_bar) +
         feedforward(j0, errors.Q, desired);
}

}  // namespace so3lab
