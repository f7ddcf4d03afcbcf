#include "so3lab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "so3lab/errors.hpp"

namespace so3lab {

bool is_positive_definite(const Mat2& m) { return m(0, 0) > 0.0 && m.determinant() > 0.0; }

RatioCheck check_inertia_ratio(const InertiaSpec& j0, const WeightMatrix& g_e) {
  RatioCheck r;
  r.lhs = j0.lambda_max() / j0.lambda_min();
  r.rhs = g_e.trace() / g_e.norm();
  r.ok = r.lhs < r.rhs;
  return r;
}

double psi_bar_E_cap(const InertiaSpec& j0, const WeightMatrix& g_e) {
  const double ratio = j0.lambda_max() / j0.lambda_min();
  return std::min(g_e.n1(), 0.5 * (g_e.trace() - ratio * g_e.norm()));
}

RoaCheck check_roa(const InertiaSpec& j0, const WeightMatrix& g_e, double k_E, double psi_E0,
                   double e_wE0_norm, double psi_bar_E) {
  const double ratio = j0.lambda_max() / j0.lambda_min();
  if (0.5 * (g_e.trace() - ratio * g_e.norm()) <= 0.0) {
    throw UncertifiableScenario("inertia ratio condition fails; no admissible psi_bar_E");
  }
  RoaCheck r;
  r.psi_bar_E = psi_bar_E;
  r.psi_bar_E_max = psi_bar_E_cap(j0, g_e);
  r.margin_initial = psi_bar_E - psi_E0;
  r.margin_cap = r.psi_bar_E_max - psi_bar_E;
  r.margin_velocity = k_E * (psi_bar_E - psi_E0) - e_wE0_norm * e_wE0_norm;
  r.ok = r.margin_initial > 0.0 && r.margin_cap > 0.0 && r.margin_velocity > 0.0;
  return r;
}

std::optional<ScalarGains> scalar_gains(const ControllerGains& c, const ObserverGains& o) {
  if (!c.k_R.is_scalar() || !c.k_Omega.is_scalar() || !o.k_E.is_scalar() || !o.k_v.is_scalar()) {
    return std::nullopt;
  }
  return ScalarGains{c.k_R.scalar_value(), c.k_Omega.scalar_value(), o.k_E.scalar_value(),
                     o.k_v.scalar_value()};
}

std::pair<double, double> controller_b_constants(const WeightMatrix& g, double psi) {
  if (!(psi > 0.0 && psi < g.n1())) throw InvalidPsiBound("psi must lie in (0, n1)");
  return {g.n1() / (g.n2() + g.n3()), g.n1() * g.n4() / (g.n5() * (g.n1() - psi))};
}

namespace {

Mat2 sym2(double a, double b, double d) {
  Mat2 m;
  m << a, b, b, d;
  return m;
}

double tracking_bound_term(const WeightMatrix& g, double B2) {
  return std::sqrt(2.0) * g.trace() + B2;
}

}  // namespace

BoundMatrices bound_matrices(const InertiaSpec& j0, const WeightMatrix& g, const WeightMatrix& g_e,
                             const ScalarGains& k, double psi, double psi_bar_E, double c1, double c2,
                             double omega_max) {
  BoundMatrices out;
  BoundConstants& b = out.k;
  b.lambda_m = j0.lambda_min();
  b.lambda_M = j0.lambda_max();
  std::tie(b.b1, b.b2) = controller_b_constants(g, psi);
  b.B1 = chi_offset_bound(j0, omega_max);
  b.B2 = 0.5 * std::sqrt(12.0 * g.n2() + 3.0 * g.n3());
  b.B3 = k.k_Omega - 0.5 * c1 * b.lambda_M * tracking_bound_term(g, b.B2);
  b.A_E = (g_e.trace() - 2.0 * psi_bar_E) * b.lambda_m - g_e.norm() * b.lambda_M;
  b.B_E = g_e.trace() + g_e.norm();

  const double lm = b.lambda_m, lM = b.lambda_M;
  out.M[0] = 0.5 * sym2(lm, -c1 * lM, 2.0 * b.b1 * k.k_R);
  out.M[1] = 0.5 * sym2(lM, c1 * lM, 2.0 * b.b2 * k.k_R);
  const double m3 = k.k_E * 2.0 * g_e.n1() / (g_e.n2() + g_e.n3());
  const double m4 = k.k_E * 2.0 * g_e.n1() * g_e.n4() / (g_e.n5() * (g_e.n1() - psi_bar_E));
  out.M[2] = 0.5 * sym2(m3, -c2, 2.0);
  out.M[3] = 0.5 * sym2(m4, c2, 2.0);

  const double w_ee = c2 * b.A_E / (3.0 * lM * lm);
  out.W[0] = 0.5 * c1 * sym2(c1 > 0.0 ? b.B3 / c1 : 0.0, k.k_Omega + b.B1, k.k_R);
  out.W[1] = 0.5 * sym2(c1 * k.k_R, c1 * k.k_Omega / lm, w_ee);
  out.W[2] = 0.5 * sym2(b.B3, -k.k_Omega / lm, w_ee);
  out.W[3] = (0.5 / lm) * sym2(k.k_E * (2.0 * k.k_v * lm - c2 * lM) / lM, -0.5 * c2 * k.k_v * b.B_E,
                               c2 * b.A_E / (3.0 * lM));

  out.all_pd = c1 > 0.0 && c2 > 0.0;
  for (const Mat2& m : out.M) out.all_pd = out.all_pd && is_positive_definite(m);
  for (const Mat2& m : out.W) out.all_pd = out.all_pd && is_positive_definite(m);
  return out;
}

std::optional<LyapunovConstants> choose_constants(const InertiaSpec& j0, const WeightMatrix& g,
                                                  const WeightMatrix& g_e, const ScalarGains& k,
                                                  double psi, double psi_bar_E, double omega_max) {
  const double lm = j0.lambda_min(), lM = j0.lambda_max();
  const double a_e = (g_e.trace() - 2.0 * psi_bar_E) * lm - g_e.norm() * lM;
  if (a_e <= 0.0) return std::nullopt;

  const double c2_cap = std::min(
      {2.0 * std::sqrt(k.k_E * g_e.n1() / (g_e.n2() + g_e.n3())),
       2.0 * std::sqrt(k.k_E * g_e.n1() * g_e.n4() / (g_e.n5() * (g_e.n1() - psi_bar_E))),
       2.0 * k.k_v * lm / lM});
  const double B1 = chi_offset_bound(j0, omega_max);
  const double B2 = 0.5 * std::sqrt(12.0 * g.n2() + 3.0 * g.n3());
  const double t = tracking_bound_term(g, B2);
  constexpr double kFloor = 1e-12;

  // c2 sweeps down its admissible interval in steps of 2^(-1/16).
  const double c2_step = std::pow(2.0, -1.0 / 16.0);
  for (double c2 = c2_cap * c2_step; c2 > kFloor; c2 *= c2_step) {
    double c1 = std::min({2.0 * k.k_Omega / (lM * t), c2 * k.k_R * lm * a_e / (3.0 * k.k_Omega * k.k_Omega * lM),
                          2.0 * k.k_R * k.k_Omega / (k.k_R * lM * t + 2.0 * std::pow(k.k_Omega + B1, 2))});
    for (; c1 > kFloor; c1 *= 0.5) {
      if (bound_matrices(j0, g, g_e, k, psi, psi_bar_E, c1, c2, omega_max).all_pd) {
        return LyapunovConstants{c1, c2};
      }
    }
  }
  return std::nullopt;
}

std::vector<LyapunovSample> lyapunov_trace(const Scenario& s, const TrajectoryLog& log,
                                           const LyapunovConstants& c, const BoundMatrices& bounds,
                                           double psi, double psi_bar_E) {
  const Mat3& j = s.inertia.matrix();
  const double k_R = s.controller.k_R.scale();
  std::vector<LyapunovSample> out;
  out.reserve(log.samples.size());
  for (const LogSample& l : log.samples) {
    LyapunovSample y;
    y.t = l.t;
    y.U = l.U;
    y.Psi = l.Psi;
    y.Psi_E = l.Psi_E;
    y.V_c = 0.5 * l.e_Omega.dot(j * l.e_Omega) + k_R * l.Psi + c.c1 * l.e_R.dot(j * l.e_Omega);
    y.V_o = l.U - c.c2 * l.e_wE.dot(l.e_RE);
    y.V = y.V_c + y.V_o;
    y.norm_e_R = l.e_R.norm();
    y.norm_e_Omega = l.e_Omega.norm();
    y.norm_e_RE = l.e_RE.norm();
    y.norm_e_wE = l.e_wE.norm();
    y.in_domain = l.Psi < psi && l.Psi_E < psi_bar_E;
    if (y.in_domain) {
      const Eigen::Vector2d alpha(y.norm_e_Omega, y.norm_e_R);
      const Eigen::Vector2d xi(y.norm_e_RE, y.norm_e_wE);
      const double slack_c = 1e-12 * (1.0 + std::abs(y.V_c));
      const double slack_o = 1e-12 * (1.0 + std::abs(y.V_o));
      y.sandwich_c = alpha.dot(bounds.M[0] * alpha) <= y.V_c + slack_c &&
                     y.V_c <= alpha.dot(bounds.M[1] * alpha) + slack_c;
      y.sandwich_o = xi.dot(bounds.M[2] * xi) <= y.V_o + slack_o && y.V_o <= xi.dot(bounds.M[3] * xi) + slack_o;
    }
    out.push_back(y);
  }
  return out;
}

double error_norm_sum(const LogSample& s) {
  return s.e_RE.norm() + s.velocity_error.norm() + s.e_R.norm() + s.e_Omega.norm();
}

ExponentialFit fit_exponential_rate(const TrajectoryLog& log, double t0, double t1) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (const LogSample& l : log.samples) {
    if (l.t < t0 || l.t > t1) continue;
    const double y = std::log(error_norm_sum(l));
    sx += l.t;
    sy += y;
    sxx += l.t * l.t;
    sxy += l.t * y;
    syy += y * y;
    ++n;
  }
  ExponentialFit f;
  f.points = n;
  if (n < 2) return f;
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  f.slope = cxy / cxx;
  f.r_squared = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
  return f;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return "CERTIFIED";
    case Verdict::UncertifiedConvergent:
      return "UNCERTIFIED-CONVERGENT";
    case Verdict::Uncertifiable:
      return "UNCERTIFIABLE";
    case Verdict::Divergent:
      return "DIVERGENT";
  }
  return "UNKNOWN";
}

bool run_converged(const TrajectoryLog& log) {
  if (log.samples.empty()) return false;
  const LogSample& first = log.samples.front();
  const LogSample& last = log.samples.back();
  const double tol = 1e-2;
  return last.e_RE.norm() < tol && last.velocity_error.norm() < tol && last.e_R.norm() < tol &&
         last.e_Omega.norm() < tol && error_norm_sum(last) <= tol * error_norm_sum(first);
}

SeparationCertificate certify(const Scenario& s, const TrajectoryLog* simulation) {
  SeparationCertificate c;
  c.ratio = check_inertia_ratio(s.inertia, s.G_E);
  c.psi = s.psi.value_or(0.9 * s.G.n1());
  c.psi_bar_E_max = psi_bar_E_cap(s.inertia, s.G_E);
  c.psi_bar_E = s.psi_bar_E.value_or(0.9 * c.psi_bar_E_max);
  c.omega_max = max_desired_rate(s.trajectory, s.duration, 1e-2);
  c.notes.push_back("roa velocity condition uses psi_bar_E");
  c.notes.push_back("B1* = max|2 lambda_i - tr J0| * Omega_max; mu read as e_wE");

  const auto gains = scalar_gains(s.controller, s.observer);
  c.scalar_gains = gains.has_value();

  bool certified = false;
  if (!c.ratio.ok) {
    c.notes.push_back("inertia ratio condition fails");
  } else if (!gains) {
    c.notes.push_back("matrix gains are outside the certificate");
  } else {
    const SimState x0 = initial_state(s);
    const EstimateErrors ee = compute_estimate_errors(s.inertia, s.G_E, s.observer, x0.body, x0.obs);
    c.roa = check_roa(s.inertia, s.G_E, gains->k_E, ee.Psi_E, ee.e_wE.norm(), c.psi_bar_E);
    const double psi0 = error_function(s.G, x0.body.R.transpose() * evaluate_desired(s.trajectory, 0.0).R_d);
    if (psi0 >= c.psi) c.notes.push_back("initial tracking error lies outside Psi < psi");

    if (c.psi_bar_E > 0.0 && c.psi_bar_E < s.G_E.n1()) {
      c.constants = choose_constants(s.inertia, s.G, s.G_E, *gains, c.psi, c.psi_bar_E, c.omega_max);
    }
    if (c.constants) {
      c.bounds = bound_matrices(s.inertia, s.G, s.G_E, *gains, c.psi, c.psi_bar_E, c.constants->c1,
                                c.constants->c2, c.omega_max);
      c.all_pd = c.bounds->all_pd;
    } else {
      c.notes.push_back("no (c1, c2) makes every bound matrix positive definite");
    }
    certified = c.roa->ok && psi0 < c.psi && c.all_pd;
  }
  c.verdict = certified ? Verdict::Certified : Verdict::Uncertifiable;

  if (simulation) {
    c.simulated = true;
    c.converged = run_converged(*simulation);
    if (!simulation->samples.empty()) c.terminal_error = error_norm_sum(simulation->samples.back());
    if (!certified) c.verdict = c.converged ? Verdict::UncertifiedConvergent : Verdict::Divergent;
    if (certified && !c.converged) c.notes.push_back("certified scenario did not converge within the horizon");
  }
  return c;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_certificate(const SeparationCertificate& c) {
  std::ostringstream os;
  os << "ratio_lhs=" << num(c.ratio.lhs) << '\n'
     << "ratio_rhs=" << num(c.ratio.rhs) << '\n'
     << "ratio_ok=" << (c.ratio.ok ? "true" : "false") << '\n'
     << "psi=" << num(c.psi) << '\n'
     << "psi_bar_E=" << num(c.psi_bar_E) << '\n'
     << "psi_bar_E_max=" << num(c.psi_bar_E_max) << '\n'
     << "omega_max=" << num(c.omega_max) << '\n'
     << "scalar_gains=" << (c.scalar_gains ? "true" : "false") << '\n';
  if (c.roa) {
    os << "roa_ok=" << (c.roa->ok ? "true" : "false") << '\n'
       << "roa_margin_initial=" << num(c.roa->margin_initial) << '\n'
       << "roa_margin_cap=" << num(c.roa->margin_cap) << '\n'
       << "roa_margin_velocity=" << num(c.roa->margin_velocity) << '\n';
  }
  if (c.constants) {
    os << "c1=" << num(c.constants->c1) << '\n' << "c2=" << num(c.constants->c2) << '\n';
  } else if (c.ratio.ok && c.scalar_gains) {
    os << "constants=Infeasible\n";
  }
  if (c.bounds) {
    const char* names[] = {"M1", "M2", "M3", "M4"};
    for (int i = 0; i < 4; ++i) {
      const Mat2& m = c.bounds->M[static_cast<std::size_t>(i)];
      os << names[i] << '=' << num(m(0, 0)) << ',' << num(m(0, 1)) << ',' << num(m(1, 1)) << '\n';
    }
    for (int i = 0; i < 4; ++i) {
      const Mat2& m = c.bounds->W[static_cast<std::size_t>(i)];
      os << 'W' << i + 1 << '=' << num(m(0, 0)) << ',' << num(m(0, 1)) << ',' << num(m(1, 1)) << '\n';
    }
    os << "all_pd=" << (c.all_pd ? "true" : "false") << '\n';
  }
  if (c.simulated) {
    os << "simulated_converged=" << (c.converged ? "true" : "false") << '\n'
       << "terminal_error_sum=" << num(c.terminal_error) << '\n';
  }
  for (const std::string& n : c.notes) os << "note=" << n << '\n';
  os << "verdict=" << to_string(c.verdict) << '\n';
  return os.str();
}

}  // namespace so3lab
