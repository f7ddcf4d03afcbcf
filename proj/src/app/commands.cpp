#include "so3lab/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "so3lab/app/config.hpp"
#include "so3lab/app/csv.hpp"
#include "so3lab/lyapunov.hpp"
#include "so3lab/monte_carlo.hpp"
#include "so3lab/validation.hpp"

namespace so3lab::app {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put(std::ostringstream& os, const char* key, const Mat3& m) {
  os << key << '=';
  for (int i = 0; i < 9; ++i) os << (i ? "," : "") << num(m(i / 3, i % 3));
  os << '\n';
}

void put(std::ostringstream& os, const char* key, const Vec3& v) {
  os << key << '=' << num(v.x()) << ',' << num(v.y()) << ',' << num(v.z()) << '\n';
}

std::string describe_angle(const AngleProfile& a) {
  static const char* kinds[] = {"constant", "sine", "cosine"};
  return std::string(kinds[static_cast<int>(a.kind)]) + "(" + num(a.a) + "," + num(a.b) + "," + num(a.c) + ")";
}

/// Time after which a per-step value stays below a threshold.
struct SettleTracker {
  double threshold;
  std::optional<double> since;
  void update(double t, double v) {
    if (v < threshold) {
      if (!since) since = t;
    } else {
      since.reset();
    }
  }
};

std::string time_or_none(const std::optional<double>& t) { return t ? num(*t) : "none"; }

template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalBlowup& e) {
    err << "numerical blow-up at t=" << num(e.time()) << ": " << e.what() << '\n';
    return kExitBlowup;
  } catch (const InvalidScenario& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path + ": cannot open output file");
  return f;
}

}  // namespace

Scenario resolve_scenario(const ScenarioArgs& a) {
  const ControlMode mode = a.mode ? control_mode_from_string(*a.mode) : ControlMode::VelocityFree;
  Scenario s;
  if (a.config) {
    if (a.preset) throw ConfigError("give either a config file or a preset, not both");
    s = load_config(*a.config);
    if (a.mode) s.mode = mode;
  } else if (a.preset) {
    s = preset(*a.preset, mode);
  } else {
    throw ConfigError("a config file or --preset is required");
  }
  if (a.step) s.step = *a.step;
  if (a.duration) s.duration = *a.duration;
  try {
    s.validate();
  } catch (const InvalidScenario& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::string describe_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "name=" << s.name << '\n';
  put(os, "J0", s.inertia.matrix());
  os << "G=" << num(s.G[0]) << ',' << num(s.G[1]) << ',' << num(s.G[2]) << '\n';
  os << "G_E=" << num(s.G_E[0]) << ',' << num(s.G_E[1]) << ',' << num(s.G_E[2]) << '\n';
  put(os, "k_R", s.controller.k_R.as_matrix());
  put(os, "k_Omega", s.controller.k_Omega.as_matrix());
  put(os, "k_E", s.observer.k_E.as_matrix());
  put(os, "k_v", s.observer.k_v.as_matrix());
  put(os, "R0", s.R0.matrix());
  put(os, "Omega0", s.Omega0);
  put(os, "R_bar0", s.R_bar0.matrix());
  put(os, "omega_bar0", s.omega_bar0);
  if (const auto* sp = std::get_if<Setpoint>(&s.trajectory)) {
    put(os, "R_d", sp->R_d.matrix());
  } else {
    const auto& e = std::get<Euler321Trajectory>(s.trajectory);
    os << "euler321=" << describe_angle(e.yaw) << ';' << describe_angle(e.pitch) << ';' << describe_angle(e.roll)
       << '\n';
  }
  os << "mode=" << to_string(s.mode) << '\n';
  if (s.mode == ControlMode::OpenLoop) {
    put(os, "open_loop_constant", s.open_loop.constant);
    put(os, "open_loop_amplitude", s.open_loop.amplitude);
    os << "open_loop_frequency=" << num(s.open_loop.frequency) << '\n'
       << "open_loop_frame=" << (s.open_loop.inertial_frame ? "inertial" : "body") << '\n';
  }
  os << "duration=" << num(s.duration) << "\nstep=" << num(s.step) << "\nseed=" << s.seed
     << "\ndecimation=" << s.decimation << '\n';
  if (s.psi) os << "psi=" << num(*s.psi) << '\n';
  if (s.psi_bar_E) os << "psi_bar_E=" << num(*s.psi_bar_E) << '\n';
  return os.str();
}

std::string scenario_digest(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : describe_scenario(s)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = resolve_scenario(a);
    std::optional<std::ofstream> csv;
    if (a.out) csv = open_out(*a.out);

    constexpr double kThreshold = 1e-4;
    SettleTracker e_re{kThreshold, {}}, vel{kThreshold, {}}, e_r{kThreshold, {}}, e_om{kThreshold, {}};
    double max_du = 0.0;
    std::optional<Vec3> prev_u;
    RunOptions opt;
    opt.on_step = [&](const LogSample& l) {
      e_re.update(l.t, l.e_RE.norm());
      vel.update(l.t, l.velocity_error.norm());
      e_r.update(l.t, l.e_R.norm());
      e_om.update(l.t, l.e_Omega.norm());
      if (prev_u) max_du = std::max(max_du, (l.u - *prev_u).norm());
      prev_u = l.u;
    };
    const TrajectoryLog log = run(s, opt);
    const SeparationCertificate cert = certify(s, &log);

    std::vector<double> V;
    if (a.with_V) {
      if (cert.constants && cert.bounds) {
        for (const LyapunovSample& y :
             lyapunov_trace(s, log, *cert.constants, *cert.bounds, cert.psi, cert.psi_bar_E)) {
          V.push_back(y.V);
        }
      } else {
        err << "note: V column omitted, no certificate constants for this scenario\n";
      }
    }
    if (csv) {
      write_csv(*csv, log, V);
      if (!*csv) throw Error("failed writing " + *a.out);
    }

    const LogSample& last = log.samples.back();
    const double t_end = last.t;
    const ExponentialFit fit = fit_exponential_rate(log, std::min(5.0, 0.2 * t_end), std::min(25.0, 0.85 * t_end));
    double max_ortho = 0.0;
    for (const LogSample& l : log.samples) max_ortho = std::max({max_ortho, l.ortho_R, l.ortho_R_bar});

    out << "scenario=" << s.name << '\n'
        << "mode=" << to_string(s.mode) << '\n'
        << "digest=" << scenario_digest(s) << '\n'
        << "steps=" << s.step_count() << '\n'
        << "step=" << num(s.step) << '\n'
        << "t_end=" << num(t_end) << '\n'
        << "terminal_eRE=" << num(last.e_RE.norm()) << '\n'
        << "terminal_westim_err=" << num(last.velocity_error.norm()) << '\n'
        << "terminal_eR=" << num(last.e_R.norm()) << '\n'
        << "terminal_eOmega=" << num(last.e_Omega.norm()) << '\n'
        << "settle_time_eRE=" << time_or_none(e_re.since) << '\n'
        << "settle_time_westim_err=" << time_or_none(vel.since) << '\n'
        << "settle_time_eR=" << time_or_none(e_r.since) << '\n'
        << "settle_time_eOmega=" << time_or_none(e_om.since) << '\n'
        << "fitted_rate=" << num(fit.slope) << '\n'
        << "fitted_rate_r2=" << num(fit.r_squared) << '\n'
        << "max_step_du=" << num(max_du) << '\n'
        << "max_ortho=" << num(max_ortho) << '\n'
        << "certificate=" << to_string(cert.verdict) << '\n'
        << "reprojections=" << log.reprojections << '\n'
        << "wall_time=" << num(log.wall_time) << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_certify(const CertifyArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = resolve_scenario(a);
    std::optional<TrajectoryLog> log;
    if (a.simulate) {
      RunOptions opt;
      opt.store_samples = false;
      log = run(s, opt);
    }
    const SeparationCertificate c = certify(s, log ? &*log : nullptr);
    out << "scenario=" << s.name << '\n' << "digest=" << scenario_digest(s) << '\n' << format_certificate(c);
    return static_cast<int>(kExitOk);
  });
}

int cmd_montecarlo(const MonteCarloArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = resolve_scenario(a);
    if (a.n < 1) throw ConfigError("--n must be at least 1");
    if (a.equilibrium && (*a.equilibrium < 0 || *a.equilibrium > 3)) {
      throw ConfigError("--equilibrium must be 0 (identity) or 1..3");
    }
    MonteCarloOptions o;
    o.n = a.n;
    o.seed = a.seed;
    o.sampler.equilibrium = a.equilibrium;
    o.sampler.perturbation = a.perturbation;
    o.threads = a.threads;
    const MonteCarloReport r = monte_carlo(s, o);
    const std::string csv = format_monte_carlo_csv(r);
    if (a.out) {
      std::ofstream f = open_out(*a.out);
      f << csv;
      if (!f) throw Error("failed writing " + *a.out);
    } else {
      out << csv;
    }
    out << "runs=" << a.n << '\n'
        << "desired=" << r.desired << '\n'
        << "undesired1=" << r.undesired[0] << '\n'
        << "undesired2=" << r.undesired[1] << '\n'
        << "undesired3=" << r.undesired[2] << '\n'
        << "not_equilibrium=" << r.not_equilibrium << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = resolve_scenario(a);
    const double h0 = a.coarse_step.value_or(4.0 * s.step);
    if (!(h0 > 0.0) || s.duration < 4.0 * h0) throw ConfigError("coarse step too large for the duration");
    std::optional<double> fault;
    if (a.inject_fault) fault = 0.5 * s.duration;
    const ConvergenceReport r = validate_convergence(s, {h0, h0 / 2.0, h0 / 4.0}, fault);
    out << "scenario=" << s.name << '\n' << format_validation(r);
    return static_cast<int>(r.passed ? kExitOk : kExitValidation);
  });
}

}  // namespace so3lab::app
