#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "so3lab/controller.hpp"
#include "so3lab/observer.hpp"

namespace so3lab {

enum class ControlMode { FullState, VelocityFree, OpenLoop };

std::string to_string(ControlMode mode);
ControlMode control_mode_from_string(const std::string& s);

/// Prescribed moment for open-loop runs: constant + amplitude * sin(frequency t),
/// expressed in the body frame (u) or the inertial frame (tau).
struct OpenLoopMoment {
  Vec3 constant = Vec3::Zero();
  Vec3 amplitude = Vec3::Zero();
  double frequency = 0.0;
  bool inertial_frame = false;

  Vec3 body_moment(const Rotation& r, double t) const;
};

struct Scenario {
  std::string name = "custom";
  InertiaSpec inertia = InertiaSpec::diagonal(1.0, 2.0, 3.0);
  WeightMatrix G{1.1, 1.0, 0.9};
  WeightMatrix G_E{1.1, 1.0, 0.9};
  ControllerGains controller{Gain::scalar(1.0), Gain::scalar(1.0)};
  ObserverGains observer{Gain::scalar(1.0), Gain::scalar(1.0)};

  Rotation R0;
  Vec3 Omega0 = Vec3::Zero();
  Rotation R_bar0;
  Vec3 omega_bar0 = Vec3::Zero();  ///< inertial frame

  DesiredTrajectory trajectory = Setpoint{Rotation::identity()};
  ControlMode mode = ControlMode::VelocityFree;
  OpenLoopMoment open_loop;

  double duration = 30.0;
  double step = 1e-3;
  std::uint64_t seed = 0;
  int decimation = 1;

  /// Certificate parameters; defaults are derived from G and G_E when empty.
  std::optional<double> psi;
  std::optional<double> psi_bar_E;

  /// Throws InvalidScenario on h <= 0, duration < h, or decimation < 1.
  void validate() const;
  long step_count() const;
};

/// Detumbling example: J0 = diag(5,1,2), R(0) = exp(pi/4 e1), Omega(0) = (1,-1.5,2.5),
/// G = G_E = diag(1.1,1,0.9), k_R = 16 J0, k_Omega = k_v = 5.6 J0, k_E = 10 J0,
/// R_d = I. The estimate starts at R_bar(0) = I, omega_bar(0) = 0.
Scenario stabilization_v_a(ControlMode mode = ControlMode::VelocityFree);

/// Same plant, gains and initial conditions tracking the 3-2-1 Euler angles
/// (1, sin(0.05 t), cos(0.1 t) + 2) over 40 s.
Scenario tracking_v_b(ControlMode mode = ControlMode::VelocityFree);

struct SimState {
  RigidBodyState body;
  ObserverState obs;
};

SimState initial_state(const Scenario& s);

/// Body-frame control moment at state x and time t for the scenario's mode.
/// The velocity-free branch reads only the attitude and the observer state.
Vec3 control_moment(const Scenario& s, const SimState& x, double t);

/// Velocity-free law as a function of what such a controller can see.
Vec3 velocity_free_moment(const Scenario& s, const Rotation& r, const ObserverState& obs, double t);

/// Attitude and inertial moment seen by the observer at every integrator stage.
struct ObserverInput {
  Rotation R;
  Vec3 tau;
};
using ObserverTape = std::vector<ObserverInput>;

struct StepStats {
  int reprojections = 0;
};

/// One RKMK4 step of the coupled plant/observer/controller system. Attitudes
/// move by R <- R exp(h u) (body) and R_bar <- exp(h u) R_bar (inertial) with
/// dexp^{-1} corrections; momenta by ordinary RK4. Attitudes are re-projected
/// when their orthogonality residual exceeds 1e-12.
/// Throws NumericalBlowup if a norm exceeds 1e12 or turns non-finite.
SimState step(const Scenario& s, const SimState& x, double t, double h, StepStats* stats = nullptr,
              ObserverTape* tape = nullptr);

/// Integrates only the observer from a recorded tape of (R, tau) stage inputs.
ObserverState replay_observer(const Scenario& s, const ObserverTape& tape, double h, long steps);

struct LogSample {
  double t = 0.0;
  Rotation R;
  Vec3 Omega = Vec3::Zero();
  Rotation R_bar;
  Vec3 p_bar = Vec3::Zero();
  Vec3 omega_bar = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  DesiredState desired;

  Vec3 e_RE = Vec3::Zero();
  Vec3 velocity_error = Vec3::Zero();  ///< omega - omega_bar
  Vec3 e_wE = Vec3::Zero();
  Vec3 w_E = Vec3::Zero();
  Vec3 e_R = Vec3::Zero();
  Vec3 e_Omega = Vec3::Zero();
  Vec3 e_Omega_bar = Vec3::Zero();
  double Psi = 0.0;
  double Psi_E = 0.0;
  double U = 0.0;
  double ortho_R = 0.0;
  double ortho_R_bar = 0.0;
};

LogSample make_sample(const Scenario& s, const SimState& x, double t);

struct TrajectoryLog {
  std::string scenario;
  double step = 0.0;
  std::vector<LogSample> samples;
  int reprojections = 0;
  double wall_time = 0.0;
};

struct RunOptions {
  /// Called on every integrator step (independent of decimation).
  std::function<void(const LogSample&)> on_step;
  ObserverTape* tape = nullptr;
  /// When false only the first and last samples are stored.
  bool store_samples = true;
};

/// Deterministic fixed-step integration of the scenario from t = 0 to duration.
TrajectoryLog run(const Scenario& s, const RunOptions& options = {});

}  // namespace so3lab
