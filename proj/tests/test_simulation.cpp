#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "so3lab/errors.hpp"
#include "so3lab/simulation.hpp"
#include "test_util.hpp"

using namespace so3lab;

namespace {

double state_distance(const SimState& a, const SimState& b) {
  return (a.body.R.matrix() - b.body.R.matrix()).norm() + (a.body.Omega - b.body.Omega).norm() +
         (a.obs.R_bar.matrix() - b.obs.R_bar.matrix()).norm() + (a.obs.p_bar - b.obs.p_bar).norm();
}

SimState integrate(const Scenario& s, double h, double t1) {
  SimState x = initial_state(s);
  const long n = std::lround(t1 / h);
  for (long i = 0; i < n; ++i) x = step(s, x, i * h, h);
  return x;
}

bool same_bits(const Mat3& a, const Mat3& b) { return std::memcmp(a.data(), b.data(), sizeof(double) * 9) == 0; }
bool same_bits(const Vec3& a, const Vec3& b) { return std::memcmp(a.data(), b.data(), sizeof(double) * 3) == 0; }

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("detumbling preset parameters") {
  const Scenario s = stabilization_v_a();
  CHECK(s.inertia.matrix() == Mat3(Vec3(5, 1, 2).asDiagonal()));
  CHECK(s.G[0] == 1.1);
  CHECK(s.G[1] == 1.0);
  CHECK(s.G[2] == 0.9);
  CHECK(s.controller.k_R.as_matrix() == 16 * s.inertia.matrix());
  CHECK(s.controller.k_Omega.as_matrix() == 5.6 * s.inertia.matrix());
  CHECK(s.observer.k_v.as_matrix() == 5.6 * s.inertia.matrix());
  CHECK(s.observer.k_E.as_matrix() == 10 * s.inertia.matrix());
  CHECK(test::max_abs(s.R0.matrix() - exp_so3(Vec3(std::numbers::pi / 4, 0, 0)).matrix()) == 0.0);
  CHECK(s.Omega0 == Vec3(1, -1.5, 2.5));
  CHECK(s.duration == 30.0);
  CHECK(s.step == 1e-3);
  const Scenario b = tracking_v_b();
  CHECK(b.duration == 40.0);
  const auto d = evaluate_desired(b.trajectory, 0.0);
  CHECK(test::max_abs(d.R_d.matrix() - euler321_rotation(1.0, 0.0, 3.0).matrix()) < 1e-15);
}

TEST_CASE("scenario validation") {
  Scenario s = stabilization_v_a();
  s.step = -1e-3;
  CHECK_THROWS_AS(s.validate(), InvalidScenario);
  s.step = 1.0;
  s.duration = 0.5;
  CHECK_THROWS_AS(s.validate(), InvalidScenario);
  s = stabilization_v_a();
  s.decimation = 0;
  CHECK_THROWS_AS(s.validate(), InvalidScenario);
  CHECK_THROWS_AS(control_mode_from_string("bang-bang"), InvalidScenario);
  CHECK(control_mode_from_string("full-state") == ControlMode::FullState);
}

TEST_CASE("equilibrium is preserved") {
  for (ControlMode mode : {ControlMode::FullState, ControlMode::VelocityFree, ControlMode::OpenLoop}) {
    Scenario s = stabilization_v_a(mode);
    s.R0 = Rotation();
    s.Omega0.setZero();
    const SimState x0 = initial_state(s);
    SimState x = x0;
    for (int i = 0; i < 100; ++i) x = step(s, x, i * s.step, s.step);
    CHECK(state_distance(x, x0) < 1e-14);
  }
}

TEST_CASE("velocity-free moment ignores the true angular velocity") {
  const Scenario s = stabilization_v_a();
  SimState x = initial_state(s);
  const Vec3 u = control_moment(s, x, 0.0);
  x.body.Omega = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  CHECK(control_moment(s, x, 0.0) == u);
}

TEST_CASE("fourth-order self-convergence") {
  Scenario s = stabilization_v_a();
  const double t1 = 1.0;
  const SimState ref = integrate(s, 1e-4, t1);
  const double e1 = state_distance(integrate(s, 1e-3, t1), ref);
  const double e2 = state_distance(integrate(s, 5e-4, t1), ref);
  MESSAGE("error ratio " << e1 / e2);
  CHECK(e1 / e2 > 13.0);
  CHECK(e1 / e2 < 19.0);
}

TEST_CASE("runs are bit-identical") {
  Scenario s = tracking_v_b();
  s.duration = 2.0;
  const TrajectoryLog a = run(s), b = run(s);
  REQUIRE(a.samples.size() == b.samples.size());
  bool identical = true;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    identical = identical && same_bits(a.samples[k].R.matrix(), b.samples[k].R.matrix()) &&
                same_bits(a.samples[k].Omega, b.samples[k].Omega) &&
                same_bits(a.samples[k].R_bar.matrix(), b.samples[k].R_bar.matrix()) &&
                same_bits(a.samples[k].p_bar, b.samples[k].p_bar) && same_bits(a.samples[k].u, b.samples[k].u);
  }
  CHECK(identical);
}

TEST_CASE("observer sees only the attitude and the applied moment") {
  Scenario s = stabilization_v_a();
  s.duration = 1.0;
  ObserverTape tape;
  RunOptions opt;
  opt.tape = &tape;
  const TrajectoryLog log = run(s, opt);
  CHECK(tape.size() == 4u * static_cast<std::size_t>(s.step_count()));
  const ObserverState replayed = replay_observer(s, tape, s.step, s.step_count());
  CHECK(same_bits(replayed.R_bar.matrix(), log.samples.back().R_bar.matrix()));
  CHECK(same_bits(replayed.p_bar, log.samples.back().p_bar));
  CHECK_THROWS(replay_observer(s, tape, s.step, s.step_count() + 1));
}

TEST_CASE("decimation and sample count") {
  Scenario s = stabilization_v_a();
  s.duration = 1.0;
  s.decimation = 10;
  const TrajectoryLog log = run(s);
  CHECK(log.samples.size() == 101u);
  CHECK(log.samples.back().t == doctest::Approx(1.0));
  RunOptions lean;
  lean.store_samples = false;
  long calls = 0;
  lean.on_step = [&](const LogSample&) { ++calls; };
  CHECK(run(s, lean).samples.size() == 2u);
  CHECK(calls == 1001);
}

TEST_CASE("blow-up is reported with its time") {
  Scenario s = stabilization_v_a(ControlMode::OpenLoop);
  s.open_loop.constant = Vec3(1e16, 0, 0);
  s.duration = 1.0;
  try {
    run(s);
    FAIL("expected NumericalBlowup");
  } catch (const NumericalBlowup& e) {
    CHECK(e.time() >= 0.0);
    CHECK(e.time() <= 1.0);
  }
}

TEST_CASE("full-state detumbling converges") {
  const Scenario s = stabilization_v_a(ControlMode::FullState);
  RunOptions opt;
  opt.store_samples = false;
  const LogSample last = run(s, opt).samples.back();
  CHECK(last.e_R.norm() < 1e-8);
  CHECK(last.e_Omega.norm() < 1e-8);
}

TEST_CASE("open-loop moment frames") {
  OpenLoopMoment m;
  m.constant = Vec3(1, 0, 0);
  m.amplitude = Vec3(0, 1, 0);
  m.frequency = 2.0;
  const Rotation r = exp_so3(Vec3(0, 0, std::numbers::pi / 2));
  CHECK((m.body_moment(r, 0.25) - Vec3(1, std::sin(0.5), 0)).norm() < 1e-15);
  m.inertial_frame = true;
  CHECK((m.body_moment(r, 0.25) - r.matrix().transpose() * Vec3(1, std::sin(0.5), 0)).norm() < 1e-15);
}

}
