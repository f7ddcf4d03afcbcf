#include "so3lab/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "so3lab/errors.hpp"

namespace so3lab {

namespace {

struct Derived {
  Mat3 Q_E;
  double Psi_E;
  Vec3 e_RE;
  Vec3 e_wE;
  Vec3 omega_E;
  Mat3 E_o;
  double Psi;
  Vec3 e_R;
  Vec3 e_Omega;
  Mat3 E_c;
  Vec3 J_inv_eRE;
  Vec3 ed3_rhs;  ///< J0^{-1} times the right-hand side
};

Derived derive(const Scenario& s, const LogSample& l) {
  const InertiaSpec& j0 = s.inertia;
  const RigidBodyState body{l.R, l.Omega};
  const ObserverState obs{l.R_bar, l.p_bar};
  const EstimateErrors ee = compute_estimate_errors(j0, s.G_E, s.observer, body, obs);
  const TrackingErrors te = compute_tracking_errors(s.G, body, l.desired);

  Derived d;
  d.Q_E = ee.Q_E.matrix();
  d.Psi_E = ee.Psi_E;
  d.e_RE = ee.e_RE;
  d.e_wE = ee.e_wE;
  d.omega_E = ee.w_E;
  d.E_o = observer_error_matrix(s.G_E, ee.Q_E);
  d.Psi = te.Psi;
  d.e_R = te.e_R;
  d.e_Omega = *te.e_Omega;
  d.E_c = tracking_error_matrix(s.G, te.Q);
  d.J_inv_eRE = inertial_velocity_from_momentum(j0, l.R, ee.e_RE);

  const Mat3& j = j0.matrix();
  const Vec3 q_wd = te.Q * l.desired.Omega_d;
  const Vec3 chi = chi_vector(j0, d.e_Omega, te.Q, l.desired.Omega_d);
  const Vec3 rhs = l.u + chi.cross(d.e_Omega) - j * (te.Q * l.desired.Omega_d_dot) - q_wd.cross(j * q_wd);
  d.ed3_rhs = j0.inverse() * rhs;
  return d;
}

std::vector<double> residuals_at(const Scenario& s, const Derived& m, const Derived& c, const Derived& p,
                                 double h) {
  const double k = 0.5 / h;
  std::vector<double> r(7);
  r[0] = ((p.Q_E - m.Q_E) * k - hat(c.omega_E) * c.Q_E).norm();
  r[1] = std::abs((p.Psi_E - m.Psi_E) * k - c.omega_E.dot(c.e_RE));
  r[2] = ((p.e_RE - m.e_RE) * k - c.E_o * c.omega_E).norm();
  r[3] = ((p.e_wE - m.e_wE) * k + 0.5 * (s.observer.k_E * c.J_inv_eRE)).norm();
  r[4] = std::abs((p.Psi - m.Psi) * k - c.e_R.dot(c.e_Omega));
  r[5] = ((p.e_R - m.e_R) * k - c.E_c * c.e_Omega).norm();
  r[6] = ((p.e_Omega - m.e_Omega) * k - c.ed3_rhs).norm();
  return r;
}

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

constexpr int kSpikeWindow = 10;
constexpr double kSpikeFactor = 100.0;
constexpr double kSpikeFloor = 1e-9;

}  // namespace

DerivativeReport validate_derivatives(const TrajectoryLog& log, const Scenario& s) {
  DerivativeReport rep;
  rep.step = log.step;
  const auto& names = identity_names();
  rep.identities.resize(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) rep.identities[i].name = names[i];
  const std::size_t n = log.samples.size();
  if (n < 3) return rep;

  const double h = log.step;
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = log.samples[i].t - log.samples[i - 1].t;
    if (std::abs(dt - h) > 1e-9 * std::max(1.0, h)) {
      throw InvalidScenario("derivative validation needs a log with decimation 1");
    }
  }

  std::vector<Derived> d;
  d.reserve(n);
  for (const LogSample& l : log.samples) d.push_back(derive(s, l));

  std::vector<std::vector<double>> res(names.size(), std::vector<double>(n - 2));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto r = residuals_at(s, d[i - 1], d[i], d[i + 1], h);
    for (std::size_t k = 0; k < names.size(); ++k) res[k][i - 1] = r[k];
  }

  for (std::size_t k = 0; k < names.size(); ++k) {
    IdentityResidual& out = rep.identities[k];
    const std::vector<double>& r = res[k];
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] > out.max_residual) {
        out.max_residual = r[i];
        out.t_at_max = log.samples[i + 1].t;
      }
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::size_t lo = i >= kSpikeWindow ? i - kSpikeWindow : 0;
      const std::size_t hi = std::min(r.size(), i + kSpikeWindow + 1);
      const double local = median_of(std::vector<double>(r.begin() + static_cast<std::ptrdiff_t>(lo),
                                                         r.begin() + static_cast<std::ptrdiff_t>(hi)));
      if (r[i] > kSpikeFactor * std::max(local, kSpikeFloor)) out.spike_times.push_back(log.samples[i + 1].t);
    }
  }
  return rep;
}

void inject_fault(TrajectoryLog& log, double t, double magnitude) {
  if (log.samples.empty()) return;
  auto it = std::min_element(log.samples.begin(), log.samples.end(), [t](const LogSample& a, const LogSample& b) {
    return std::abs(a.t - t) < std::abs(b.t - t);
  });
  it->R = it->R * exp_so3(Vec3(magnitude, 0.0, 0.0));
  it->Omega += Vec3::Constant(magnitude);
}

ConvergenceReport validate_convergence(const Scenario& s, const std::vector<double>& steps,
                                       std::optional<double> fault_time) {
  ConvergenceReport rep;
  rep.steps = steps;
  for (double h : steps) {
    Scenario sh = s;
    sh.step = h;
    sh.decimation = 1;
    TrajectoryLog log = run(sh);
    if (fault_time) inject_fault(log, *fault_time);
    rep.runs.push_back(validate_derivatives(log, sh));
  }

  const std::size_t m = identity_names().size();
  rep.orders.assign(m, {});
  rep.identity_pass.assign(m, true);
  rep.passed = steps.size() >= 2;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k + 1 < rep.runs.size(); ++k) {
      const double a = rep.runs[k].identities[i].max_residual;
      const double b = rep.runs[k + 1].identities[i].max_residual;
      const double ratio = rep.steps[k] / rep.steps[k + 1];
      if (a <= kResidualFloor && b <= kResidualFloor) {
        rep.orders[i].push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const double order = std::log(a / b) / std::log(ratio);
      rep.orders[i].push_back(order);
      if (!(order >= kRequiredOrder)) rep.identity_pass[i] = false;
    }
    for (const DerivativeReport& run : rep.runs) {
      if (!run.identities[i].spike_times.empty()) rep.identity_pass[i] = false;
    }
    rep.passed = rep.passed && rep.identity_pass[i];
  }
  return rep;
}

std::string format_validation(const ConvergenceReport& r) {
  std::ostringstream os;
  char buf[64];
  const auto& names = identity_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (const DerivativeReport& run : r.runs) {
      const IdentityResidual& id = run.identities[i];
      std::snprintf(buf, sizeof buf, "%.17g", id.max_residual);
      os << names[i] << ".h" << run.step << ".max_residual=" << buf;
      std::snprintf(buf, sizeof buf, "%.6g", id.t_at_max);
      os << '\n' << names[i] << ".h" << run.step << ".t_at_max=" << buf << '\n';
      for (double t : id.spike_times) {
        std::snprintf(buf, sizeof buf, "%.6g", t);
        os << names[i] << ".h" << run.step << ".spike_t=" << buf << '\n';
      }
    }
    os << names[i] << ".orders=";
    for (std::size_t k = 0; k < r.orders[i].size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.4f", r.orders[i][k]);
      os << (k ? "," : "") << buf;
    }
    os << '\n' << names[i] << ".pass=" << (r.identity_pass[i] ? "true" : "false") << '\n';
  }
  os << "validation=" << (r.passed ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace so3lab
