#pragma once

#include <string>

#include "so3lab/attitude_error.hpp"
#include "so3lab/gain.hpp"
#include "so3lab/rigid_body.hpp"

namespace so3lab {

/// Estimator state. R_bar is stored exactly as it appears in Q_E = R R_bar^T,
/// so Q_E -> I when the estimate converges. p_bar = J omega_bar is the
/// estimated inertial angular momentum.
struct ObserverState {
  static constexpr const char* kFrameConvention = "Q_E = R * R_bar^T";

  Rotation R_bar;
  Vec3 p_bar = Vec3::Zero();

  /// omega_bar = J^{-1} p_bar with J formed from the measured attitude.
  Vec3 omega_bar(const InertiaSpec& j0, const Rotation& r_meas) const;
};

struct ObserverGains {
  Gain k_E;
  Gain k_v;
};

struct EstimateErrors {
  Rotation Q_E;
  double Psi_E = 0.0;
  Vec3 e_RE = Vec3::Zero();
  Vec3 e_wE = Vec3::Zero();  ///< J omega - J omega_bar
  Vec3 w_E = Vec3::Zero();   ///< omega - omega_bar - k_v J^{-1} e_RE
  Vec3 velocity_error = Vec3::Zero();  ///< omega - omega_bar (inertial frame)
};

EstimateErrors compute_estimate_errors(const InertiaSpec& j0, const WeightMatrix& w,
                                       const ObserverGains& gains, const RigidBodyState& body,
                                       const ObserverState& obs);

struct ObserverDerivative {
  Vec3 attitude_tangent;  ///< xi with R_bar' = hat(xi) R_bar
  Vec3 p_bar_dot;
};

/// Observer vector field. Uses only the measured attitude and the applied
/// inertial moment tau; the true angular velocity is not an input.
///   d/dt p_bar = tau + 1/2 k_E J^{-1} e_RE
///   R_bar'     = hat(Q_E^T (omega_bar + k_v J^{-1} e_RE)) R_bar
ObserverDerivative observer_derivative(const InertiaSpec& j0, const WeightMatrix& w,
                                       const ObserverGains& gains, const Rotation& r_meas,
                                       const Vec3& tau, const ObserverState& obs);

struct EquilibriumClass {
  enum class Kind { Desired, Undesired, NotEquilibrium };
  Kind kind = Kind::NotEquilibrium;
  int index = 0;  ///< 1..3 for Undesired

  std::string label() const;
  bool operator==(const EquilibriumClass&) const = default;
};

inline constexpr double kEquilibriumTolerance = 1e-6;

EquilibriumClass classify_equilibrium(const EstimateErrors& errors, double tol = kEquilibriumTolerance);

/// U = e_wE^T e_wE + k_E Psi_E for scalar k_E. A matrix gain K_E uses
/// U = s (e_wE^T K_E^{-1} e_wE + Psi_E) with s = tr(K_E)/3, which reduces to the
/// scalar form when K_E = k I and keeps dU/dt independent of e_wE.
double observer_lyapunov(const WeightMatrix& w, const Gain& k_E, const EstimateErrors& errors);

/// Exact dU/dt along the observer flow: -s e_RE^T J^{-1} K_v e_RE.
double observer_lyapunov_rate(const InertiaSpec& j0, const Rotation& r, const ObserverGains& gains,
                              const Vec3& e_RE);

/// Upper bound on dU/dt: -k_E k_v ||e_RE||^2 / lambda_M for scalar gains; for
/// matrix gains -s lambda_min(sym(J^{-1} K_v)) ||e_RE||^2.
double observer_lyapunov_rate_bound(const InertiaSpec& j0, const Rotation& r,
                                    const ObserverGains& gains, const Vec3& e_RE);

/// Chetaev function about D_i: W = k_E (pair sum for D_i) - U.
double chetaev_function(const WeightMatrix& w, const Gain& k_E, const EstimateErrors& errors, int index);

}  // namespace so3lab
