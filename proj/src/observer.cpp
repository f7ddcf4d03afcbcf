#include "so3lab/observer.hpp"

#include "so3lab/errors.hpp"

namespace so3lab {

Vec3 ObserverState::omega_bar(const InertiaSpec& j0, const Rotation& r_meas) const {
  return inertial_velocity_from_momentum(j0, r_meas, p_bar);
}

EstimateErrors compute_estimate_errors(const InertiaSpec& j0, const WeightMatrix& w,
                                       const ObserverGains& gains, const RigidBodyState& body,
                                       const ObserverState& obs) {
  EstimateErrors e;
  e.Q_E = body.R * obs.R_bar.transpose();
  e.Psi_E = error_function(w, e.Q_E);
  e.e_RE = estimation_error_vector(w, e.Q_E);
  e.e_wE = body.inertial_momentum(j0) - obs.p_bar;
  const Vec3 omega = body.inertial_velocity();
  const Vec3 omega_bar = obs.omega_bar(j0, body.R);
  e.velocity_error = omega - omega_bar;
  e.w_E = e.velocity_error - gains.k_v * inertial_velocity_from_momentum(j0, body.R, e.e_RE);
  return e;
}

ObserverDerivative observer_derivative(const InertiaSpec& j0, const WeightMatrix& w,
                                       const ObserverGains& gains, const Rotation& r_meas,
                                       const Vec3& tau, const ObserverState& obs) {
  const Rotation q_e = r_meas * obs.R_bar.transpose();
  const Vec3 e_re = estimation_error_vector(w, q_e);
  const Vec3 j_inv_e = inertial_velocity_from_momentum(j0, r_meas, e_re);
  const Vec3 omega_bar = obs.omega_bar(j0, r_meas);
  ObserverDerivative d;
  d.p_bar_dot = tau + 0.5 * (gains.k_E * j_inv_e);
  d.attitude_tangent = q_e.matrix().transpose() * (omega_bar + gains.k_v * j_inv_e);
  return d;
}

std::string EquilibriumClass::label() const {
  switch (kind) {
    case Kind::Desired:
      return "Desired";
    case Kind::Undesired:
      return "Undesired(" + std::to_string(index) + ")";
    case Kind::NotEquilibrium:
      break;
  }
  return "NotEquilibrium";
}

EquilibriumClass classify_equilibrium(const EstimateErrors& errors, double tol) {
  if (errors.e_wE.norm() > tol) return {};
  const Mat3& q = errors.Q_E.matrix();
  if ((q - Mat3::Identity()).norm() <= tol) return {EquilibriumClass::Kind::Desired, 0};
  for (int i = 1; i <= 3; ++i) {
    if ((q - undesired_equilibrium(i).matrix()).norm() <= tol) {
      return {EquilibriumClass::Kind::Undesired, i};
    }
  }
  return {};
}

double observer_lyapunov(const WeightMatrix& /*w*/, const Gain& k_E, const EstimateErrors& errors) {
  if (k_E.is_scalar()) {
    return errors.e_wE.squaredNorm() + k_E.scalar_value() * errors.Psi_E;
  }
  const double s = k_E.scale();
  return s * (errors.e_wE.dot(k_E.inverse() * errors.e_wE) + errors.Psi_E);
}

double observer_lyapunov_rate(const InertiaSpec& j0, const Rotation& r, const ObserverGains& gains,
                              const Vec3& e_RE) {
  const Vec3 j_inv_e = inertial_velocity_from_momentum(j0, r, e_RE);
  // d/dt U = -s (K_v J^{-1} e)^T e
  return -gains.k_E.scale() * (gains.k_v * j_inv_e).dot(e_RE);
}

double observer_lyapunov_rate_bound(const InertiaSpec& j0, const Rotation& r,
                                    const ObserverGains& gains, const Vec3& e_RE) {
  if (gains.k_E.is_scalar() && gains.k_v.is_scalar()) {
    return -gains.k_E.scalar_value() * gains.k_v.scalar_value() / j0.lambda_max() * e_RE.squaredNorm();
  }
  const Mat3 j_inv = r.matrix() * j0.inverse() * r.matrix().transpose();
  const Mat3 a = j_inv * gains.k_v.as_matrix();
  const double mu = symmetric_eigenvalues(0.5 * (a + a.transpose()))[0];
  return -gains.k_E.scale() * mu * e_RE.squaredNorm();
}

double chetaev_function(const WeightMatrix& w, const Gain& k_E, const EstimateErrors& errors, int index) {
  return k_E.scale() * w.pair_sum_excluding(index) - observer_lyapunov(w, k_E, errors);
}

}  // namespace so3lab
