#include "so3lab/simulation.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "so3lab/errors.hpp"

namespace so3lab {

std::string to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::FullState:
      return "full-state";
    case ControlMode::VelocityFree:
      return "velocity-free";
    case ControlMode::OpenLoop:
      return "open-loop";
  }
  return "unknown";
}

ControlMode control_mode_from_string(const std::string& s) {
  if (s == "full-state") return ControlMode::FullState;
  if (s == "velocity-free") return ControlMode::VelocityFree;
  if (s == "open-loop") return ControlMode::OpenLoop;
  throw InvalidScenario("unknown control mode '" + s + "' (full-state, velocity-free, open-loop)");
}

Vec3 OpenLoopMoment::body_moment(const Rotation& r, double t) const {
  const Vec3 m = constant + amplitude * std::sin(frequency * t);
  return inertial_frame ? Vec3(r.matrix().transpose() * m) : m;
}

void Scenario::validate() const {
  if (!std::isfinite(step) || step <= 0.0) throw InvalidScenario("integrator step must be positive");
  if (!std::isfinite(duration) || duration < step) {
    throw InvalidScenario("duration must be at least one integrator step");
  }
  if (decimation < 1) throw InvalidScenario("log decimation must be >= 1");
  if (!Omega0.allFinite() || !omega_bar0.allFinite()) {
    throw InvalidScenario("initial angular velocities must be finite");
  }
}

long Scenario::step_count() const { return std::lround(duration / step); }

namespace {

Scenario preset_common(ControlMode mode) {
  Scenario s;
  const InertiaSpec j0 = InertiaSpec::diagonal(5.0, 1.0, 2.0);
  s.inertia = j0;
  s.G = WeightMatrix(1.1, 1.0, 0.9);
  s.G_E = WeightMatrix(1.1, 1.0, 0.9);
  s.controller = {Gain::matrix(16.0 * j0.matrix()), Gain::matrix(5.6 * j0.matrix())};
  s.observer = {Gain::matrix(10.0 * j0.matrix()), Gain::matrix(5.6 * j0.matrix())};
  s.R0 = exp_so3(Vec3(std::numbers::pi / 4.0, 0.0, 0.0));
  s.Omega0 = Vec3(1.0, -1.5, 2.5);
  s.R_bar0 = Rotation::identity();
  s.omega_bar0 = Vec3::Zero();
  s.mode = mode;
  s.step = 1e-3;
  return s;
}

}  // namespace

Scenario stabilization_v_a(ControlMode mode) {
  Scenario s = preset_common(mode);
  s.name = "v-a";
  s.trajectory = Setpoint{Rotation::identity()};
  s.duration = 30.0;
  return s;
}

Scenario tracking_v_b(ControlMode mode) {
  Scenario s = preset_common(mode);
  s.name = "v-b";
  s.trajectory = Euler321Trajectory{AngleProfile::constant(1.0), AngleProfile::sine(1.0, 0.05),
                                    AngleProfile::cosine(1.0, 0.1, 2.0)};
  s.duration = 40.0;
  return s;
}

SimState initial_state(const Scenario& s) {
  SimState x;
  x.body = {s.R0, s.Omega0};
  x.obs.R_bar = s.R_bar0;
  x.obs.p_bar = s.inertia.inertial(s.R0) * s.omega_bar0;
  return x;
}

Vec3 velocity_free_moment(const Scenario& s, const Rotation& r, const ObserverState& obs, double t) {
  const DesiredState d = evaluate_desired(s.trajectory, t);
  const Vec3 omega_bar_body = r.matrix().transpose() * obs.omega_bar(s.inertia, r);
  const TrackingErrors e = compute_estimated_tracking_errors(s.G, r, omega_bar_body, d);
  return velocity_free_control(s.inertia, s.controller, e, d);
}

Vec3 control_moment(const Scenario& s, const SimState& x, double t) {
  switch (s.mode) {
    case ControlMode::VelocityFree:
      return velocity_free_moment(s, x.body.R, x.obs, t);
    case ControlMode::FullState: {
      const DesiredState d = evaluate_desired(s.trajectory, t);
      return pd_control(s.inertia, s.controller, compute_tracking_errors(s.G, x.body, d), d);
    }
    case ControlMode::OpenLoop:
      return s.open_loop.body_moment(x.body.R, t);
  }
  return Vec3::Zero();
}

namespace {

struct Tangent {
  Vec3 body_attitude = Vec3::Zero();  // R' = R hat(.)
  Vec3 Omega_dot = Vec3::Zero();
  Vec3 obs_attitude = Vec3::Zero();   // R_bar' = hat(.) R_bar
  Vec3 p_bar_dot = Vec3::Zero();
};

// dexp^{-1} truncated after the second bracket; the third Bernoulli term is
// zero, so the stage error is O(h^5).
Vec3 dexpinv_left(const Vec3& u, const Vec3& k) {
  const Vec3 uk = u.cross(k);
  return k - 0.5 * uk + (1.0 / 12.0) * u.cross(uk);
}

Vec3 dexpinv_right(const Vec3& u, const Vec3& k) {
  const Vec3 uk = u.cross(k);
  return k + 0.5 * uk + (1.0 / 12.0) * u.cross(uk);
}

Tangent corrected(const Tangent& stage_offset, const Tangent& k) {
  return {dexpinv_right(stage_offset.body_attitude, k.body_attitude), k.Omega_dot,
          dexpinv_left(stage_offset.obs_attitude, k.obs_attitude), k.p_bar_dot};
}

Tangent scaled(const Tangent& k, double a) {
  return {a * k.body_attitude, a * k.Omega_dot, a * k.obs_attitude, a * k.p_bar_dot};
}

SimState advance(const SimState& x, const Tangent& u) {
  SimState y;
  y.body.R = x.body.R * exp_so3(u.body_attitude);
  y.body.Omega = x.body.Omega + u.Omega_dot;
  y.obs.R_bar = exp_so3(u.obs_attitude) * x.obs.R_bar;
  y.obs.p_bar = x.obs.p_bar + u.p_bar_dot;
  return y;
}

constexpr double kReprojectThreshold = 1e-12;
constexpr double kBlowupNorm = 1e12;

void check_finite(const SimState& y, double t) {
  const bool bad = !y.body.Omega.allFinite() || !y.obs.p_bar.allFinite() ||
                   !y.body.R.matrix().allFinite() || !y.obs.R_bar.matrix().allFinite() ||
                   y.body.Omega.norm() > kBlowupNorm || y.obs.p_bar.norm() > kBlowupNorm;
  if (bad) {
    std::ostringstream os;
    os << "numerical blow-up at t = " << t;
    throw NumericalBlowup(os.str(), t);
  }
}

template <class Field>
SimState rkmk4(const SimState& x, double t, double h, Field&& f, StepStats* stats) {
  const Tangent k1 = f(x, t);
  const Tangent u2 = scaled(k1, 0.5 * h);
  const Tangent k2 = corrected(u2, f(advance(x, u2), t + 0.5 * h));
  const Tangent u3 = scaled(k2, 0.5 * h);
  const Tangent k3 = corrected(u3, f(advance(x, u3), t + 0.5 * h));
  const Tangent u4 = scaled(k3, h);
  const Tangent k4 = corrected(u4, f(advance(x, u4), t + h));

  const double w = h / 6.0;
  Tangent total;
  total.body_attitude = w * (k1.body_attitude + 2.0 * k2.body_attitude + 2.0 * k3.body_attitude + k4.body_attitude);
  total.Omega_dot = w * (k1.Omega_dot + 2.0 * k2.Omega_dot + 2.0 * k3.Omega_dot + k4.Omega_dot);
  total.obs_attitude = w * (k1.obs_attitude + 2.0 * k2.obs_attitude + 2.0 * k3.obs_attitude + k4.obs_attitude);
  total.p_bar_dot = w * (k1.p_bar_dot + 2.0 * k2.p_bar_dot + 2.0 * k3.p_bar_dot + k4.p_bar_dot);

  SimState y = advance(x, total);
  check_finite(y, t + h);
  if (y.body.R.residual() > kReprojectThreshold) {
    y.body.R = project_to_rotation(y.body.R.matrix());
    if (stats) ++stats->reprojections;
  }
  if (y.obs.R_bar.residual() > kReprojectThreshold) {
    y.obs.R_bar = project_to_rotation(y.obs.R_bar.matrix());
    if (stats) ++stats->reprojections;
  }
  return y;
}

Tangent observer_tangent(const Scenario& s, const Rotation& r, const Vec3& tau, const ObserverState& obs) {
  const ObserverDerivative od = observer_derivative(s.inertia, s.G_E, s.observer, r, tau, obs);
  Tangent k;
  k.obs_attitude = od.attitude_tangent;
  k.p_bar_dot = od.p_bar_dot;
  return k;
}

}  // namespace

SimState step(const Scenario& s, const SimState& x, double t, double h, StepStats* stats,
              ObserverTape* tape) {
  auto field = [&](const SimState& y, double ty) {
    const Vec3 u = control_moment(s, y, ty);
    const Vec3 tau = y.body.R * u;
    if (tape) tape->push_back({y.body.R, tau});
    Tangent k = observer_tangent(s, y.body.R, tau, y.obs);
    const BodyDerivative bd = body_frame_derivative(s.inertia, y.body, u);
    k.body_attitude = bd.attitude_tangent;
    k.Omega_dot = bd.Omega_dot;
    return k;
  };
  return rkmk4(x, t, h, field, stats);
}

ObserverState replay_observer(const Scenario& s, const ObserverTape& tape, double h, long steps) {
  if (tape.size() < static_cast<std::size_t>(4 * steps)) throw Error("observer tape is too short");
  SimState x = initial_state(s);
  // The plant half of the state is frozen; only the recorded inputs drive the observer.
  x.body = {Rotation::identity(), Vec3::Zero()};
  std::size_t cursor = 0;
  auto field = [&](const SimState& y, double) {
    const ObserverInput& in = tape[cursor++];
    return observer_tangent(s, in.R, in.tau, y.obs);
  };
  for (long i = 0; i < steps; ++i) x = rkmk4(x, static_cast<double>(i) * h, h, field, nullptr);
  return x.obs;
}

LogSample make_sample(const Scenario& s, const SimState& x, double t) {
  LogSample l;
  l.t = t;
  l.R = x.body.R;
  l.Omega = x.body.Omega;
  l.R_bar = x.obs.R_bar;
  l.p_bar = x.obs.p_bar;
  l.omega_bar = x.obs.omega_bar(s.inertia, x.body.R);
  l.u = control_moment(s, x, t);
  l.desired = evaluate_desired(s.trajectory, t);

  const EstimateErrors ee = compute_estimate_errors(s.inertia, s.G_E, s.observer, x.body, x.obs);
  l.e_RE = ee.e_RE;
  l.velocity_error = ee.velocity_error;
  l.e_wE = ee.e_wE;
  l.w_E = ee.w_E;
  l.Psi_E = ee.Psi_E;
  l.U = observer_lyapunov(s.G_E, s.observer.k_E, ee);

  const Vec3 omega_bar_body = x.body.R.matrix().transpose() * l.omega_bar;
  const TrackingErrors te = compute_tracking_errors(s.G, x.body, l.desired, omega_bar_body);
  l.e_R = te.e_R;
  l.e_Omega = *te.e_Omega;
  l.e_Omega_bar = *te.e_Omega_bar;
  l.Psi = te.Psi;
  l.ortho_R = x.body.R.residual();
  l.ortho_R_bar = x.obs.R_bar.residual();
  return l;
}

TrajectoryLog run(const Scenario& s, const RunOptions& options) {
  s.validate();
  const auto start = std::chrono::steady_clock::now();
  TrajectoryLog log;
  log.scenario = s.name;
  log.step = s.step;
  const long n = s.step_count();
  const double h = s.step;

  SimState x = initial_state(s);
  StepStats stats;
  auto record = [&](long i) {
    const double t = static_cast<double>(i) * h;
    const bool stored = options.store_samples ? (i % s.decimation == 0 || i == n) : (i == 0 || i == n);
    if (!stored && !options.on_step) return;
    const LogSample sample = make_sample(s, x, t);
    if (options.on_step) options.on_step(sample);
    if (stored) log.samples.push_back(sample);
  };

  record(0);
  for (long i = 0; i < n; ++i) {
    x = step(s, x, static_cast<double>(i) * h, h, &stats, options.tape);
    record(i + 1);
  }
  log.reprojections = stats.reprojections;
  log.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return log;
}

}  // namespace so3lab
