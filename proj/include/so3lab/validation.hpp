#pragma once

#include <optional>
#include <string>
#include <vector>

#include "so3lab/simulation.hpp"

namespace so3lab {

/// Differential identities checked against central differences of a log:
///   QE_dot      d/dt Q_E   = hat(omega_E) Q_E
///   PsiE_dot    d/dt Psi_E = omega_E^T e_RE
///   eRE_dot     d/dt e_RE  = E_o omega_E
///   ewE_dot     d/dt e_wE  = -1/2 k_E J^{-1} e_RE
///   Psi_dot     d/dt Psi   = e_R^T e_Omega
///   eR_dot      d/dt e_R   = E_c e_Omega
///   eOmega_dot  J0 d/dt e_Omega = u + hat(chi) e_Omega - J0 Q Omega_d' - hat(Q Omega_d) J0 Q Omega_d
inline const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names{"QE_dot", "PsiE_dot", "eRE_dot", "ewE_dot",
                                              "Psi_dot", "eR_dot", "eOmega_dot"};
  return names;
}

struct IdentityResidual {
  std::string name;
  double max_residual = 0.0;
  double t_at_max = 0.0;
  /// Samples whose residual exceeds 100x the median of their neighbourhood (floor 1e-9).
  std::vector<double> spike_times;
};

struct DerivativeReport {
  double step = 0.0;
  std::vector<IdentityResidual> identities;
};

/// Residuals at interior samples of a decimation-1 log. Derived quantities are
/// recomputed from the logged R, Omega, R_bar, p_bar, u and desired state.
/// Throws InvalidScenario if the samples are not spaced by the log step.
DerivativeReport validate_derivatives(const TrajectoryLog& log, const Scenario& s);

/// Rotates R at the sample nearest t by exp(magnitude e1) and offsets Omega by magnitude.
void inject_fault(TrajectoryLog& log, double t, double magnitude = 1e-3);

struct ConvergenceReport {
  std::vector<double> steps;
  std::vector<DerivativeReport> runs;
  /// orders[i][k] = log2(res_k / res_{k+1}) for identity i; NaN when both residuals are at round-off.
  std::vector<std::vector<double>> orders;
  std::vector<bool> identity_pass;
  bool passed = false;
};

inline constexpr double kRequiredOrder = 1.9;
inline constexpr double kResidualFloor = 1e-10;

/// Runs the scenario once per step size (decimation forced to 1), validates each
/// log and checks the observed order. An identity passes when every adjacent
/// pair shows order >= 1.9 (or both residuals sit below 1e-10) and no spike is flagged.
ConvergenceReport validate_convergence(const Scenario& s, const std::vector<double>& steps,
                                       std::optional<double> fault_time = std::nullopt);

std::string format_validation(const ConvergenceReport& r);

}  // namespace so3lab
