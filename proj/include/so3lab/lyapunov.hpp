#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "so3lab/simulation.hpp"

namespace so3lab {

using Mat2 = Eigen::Matrix2d;

/// Positive definiteness of a symmetric 2x2 matrix by leading minors.
bool is_positive_definite(const Mat2& m);

struct RatioCheck {
  bool ok = false;
  double lhs = 0.0;  ///< lambda_M / lambda_m
  double rhs = 0.0;  ///< tr[G_E] / ||G_E||
};

RatioCheck check_inertia_ratio(const InertiaSpec& j0, const WeightMatrix& g_e);

/// min{n1, 1/2 (tr G_E - lambda_M/lambda_m ||G_E||)}; non-positive when the ratio test fails.
double psi_bar_E_cap(const InertiaSpec& j0, const WeightMatrix& g_e);

struct RoaCheck {
  bool ok = false;
  double psi_bar_E = 0.0;
  double psi_bar_E_max = 0.0;
  double margin_initial = 0.0;   ///< psi_bar_E - Psi_E(0)
  double margin_cap = 0.0;       ///< psi_bar_E_max - psi_bar_E
  double margin_velocity = 0.0;  ///< k_E (psi_bar_E - Psi_E(0)) - ||e_wE(0)||^2
};

/// Psi_E(0) < psi_bar_E < cap and ||e_wE(0)||^2 < k_E (psi_bar_E - Psi_E(0)).
/// Throws UncertifiableScenario when the cap is not positive.
RoaCheck check_roa(const InertiaSpec& j0, const WeightMatrix& g_e, double k_E, double psi_E0,
                   double e_wE0_norm, double psi_bar_E);

struct ScalarGains {
  double k_R = 0.0;
  double k_Omega = 0.0;
  double k_E = 0.0;
  double k_v = 0.0;
};

/// Scalar gains of a scenario; nullopt when any gain is a matrix.
std::optional<ScalarGains> scalar_gains(const ControllerGains& c, const ObserverGains& o);

/// Constants shared by the bound matrices.
struct BoundConstants {
  double lambda_m = 0.0;
  double lambda_M = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double B1 = 0.0;  ///< max_i |2 lambda_i - tr J0| Omega_max
  double B2 = 0.0;  ///< 1/2 sqrt(12 p2 + 3 p3)
  double B3 = 0.0;  ///< k_Omega - c1 lambda_M (sqrt2 tr G + B2) / 2
  double A_E = 0.0; ///< (tr G_E - 2 psi_bar_E) lambda_m - ||G_E|| lambda_M
  double B_E = 0.0; ///< tr G_E + ||G_E||
};

struct BoundMatrices {
  BoundConstants k;
  std::array<Mat2, 4> M;
  std::array<Mat2, 4> W;
  bool all_pd = false;
};

/// b1 = n1/(n2+n3) and b2 = n1 n4 / (n5 (n1 - psi)) computed from G.
std::pair<double, double> controller_b_constants(const WeightMatrix& g, double psi);

BoundMatrices bound_matrices(const InertiaSpec& j0, const WeightMatrix& g, const WeightMatrix& g_e,
                             const ScalarGains& gains, double psi, double psi_bar_E, double c1, double c2,
                             double omega_max);

struct LyapunovConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Searches c2 downward from its analytic cap and, for each c2, halves c1 from
/// its cap until all eight matrices are positive definite. nullopt when A_E <= 0
/// or nothing is found above 1e-12.
std::optional<LyapunovConstants> choose_constants(const InertiaSpec& j0, const WeightMatrix& g,
                                                  const WeightMatrix& g_e, const ScalarGains& gains,
                                                  double psi, double psi_bar_E, double omega_max);

struct LyapunovSample {
  double t = 0.0;
  double U = 0.0;
  double V_c = 0.0;
  double V_o = 0.0;
  double V = 0.0;
  double Psi = 0.0;
  double Psi_E = 0.0;
  double norm_e_R = 0.0;
  double norm_e_Omega = 0.0;
  double norm_e_RE = 0.0;
  double norm_e_wE = 0.0;
  bool in_domain = false;       ///< Psi < psi and Psi_E < psi_bar_E
  bool sandwich_c = true;       ///< alpha^T M1 alpha <= V_c <= alpha^T M2 alpha (checked in domain)
  bool sandwich_o = true;       ///< xi^T M3 xi <= V_o <= xi^T M4 xi (checked in domain)
};

/// V_c = 1/2 e_Omega^T J0 e_Omega + k_R Psi + c1 e_R^T J0 e_Omega and
/// V_o = U - c2 e_wE^T e_RE for every logged sample.
std::vector<LyapunovSample> lyapunov_trace(const Scenario& s, const TrajectoryLog& log,
                                           const LyapunovConstants& c, const BoundMatrices& bounds,
                                           double psi, double psi_bar_E);

/// ||e_RE|| + ||omega - omega_bar|| + ||e_R|| + ||e_Omega||
double error_norm_sum(const LogSample& s);

struct ExponentialFit {
  double slope = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least-squares line through log(error_norm_sum) over samples with t in [t0, t1].
ExponentialFit fit_exponential_rate(const TrajectoryLog& log, double t0, double t1);

enum class Verdict { Certified, UncertifiedConvergent, Uncertifiable, Divergent };
std::string to_string(Verdict v);

struct SeparationCertificate {
  RatioCheck ratio;
  double psi = 0.0;
  double psi_bar_E = 0.0;
  double psi_bar_E_max = 0.0;
  std::optional<RoaCheck> roa;
  bool scalar_gains = false;
  std::optional<LyapunovConstants> constants;
  std::optional<BoundMatrices> bounds;
  bool all_pd = false;
  double omega_max = 0.0;
  Verdict verdict = Verdict::Uncertifiable;
  std::vector<std::string> notes;

  /// Simulation evidence, filled only when a run was requested.
  bool simulated = false;
  bool converged = false;
  double terminal_error = 0.0;
};

/// psi defaults to 0.9 min pair sum of G; psi_bar_E to 0.9 of its cap.
SeparationCertificate certify(const Scenario& s, const TrajectoryLog* simulation = nullptr);

/// The simulated run counts as convergent when every terminal error norm is
/// below 1e-2 and the error sum fell by at least a factor 100.
bool run_converged(const TrajectoryLog& log);

/// key=value lines.
std::string format_certificate(const SeparationCertificate& c);

}  // namespace so3lab
