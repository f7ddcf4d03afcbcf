#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "so3lab/controller.hpp"
#include "so3lab/errors.hpp"
#include "so3lab/simulation.hpp"
#include "test_util.hpp"

using namespace so3lab;

namespace {

const WeightMatrix kG(1.1, 1.0, 0.9);
const InertiaSpec kJ = InertiaSpec::diagonal(5, 1, 2);

Euler321Trajectory tracking_family() {
  return {AngleProfile::constant(1.0), AngleProfile::sine(1.0, 0.05), AngleProfile::cosine(1.0, 0.1, 2.0)};
}

}  // namespace

TEST_SUITE("controller") {

TEST_CASE("setpoint and frozen Euler trajectories") {
  const auto d = evaluate_desired(Setpoint{Rotation()}, 3.7);
  CHECK(d.R_d.matrix() == Mat3::Identity());
  CHECK(d.Omega_d == Vec3::Zero());
  CHECK(d.Omega_d_dot == Vec3::Zero());

  const Euler321Trajectory frozen{AngleProfile::constant(1), AngleProfile::constant(0), AngleProfile::constant(2)};
  const auto f = evaluate_desired(frozen, 5.0);
  CHECK(f.Omega_d.norm() == 0.0);
  CHECK(f.Omega_d_dot.norm() == 0.0);
  CHECK(test::max_abs(f.R_d.matrix() - euler321_rotation(1, 0, 2).matrix()) < 1e-15);
}

TEST_CASE("desired rates agree with central differences") {
  const auto traj = tracking_family();
  // Faster family to make the derivatives non-trivial.
  const Euler321Trajectory fast{AngleProfile::sine(0.4, 1.3, 0.2), AngleProfile::cosine(0.3, 0.7),
                                AngleProfile::sine(0.5, 2.1, -0.3)};
  for (const Euler321Trajectory& tr : {traj, fast}) {
    for (double t : {0.0, 1.3, 17.0}) {
      const double h = 1e-5;
      const auto d = evaluate_desired(tr, t);
      const Mat3 r_dot =
          (evaluate_desired(tr, t + h).R_d.matrix() - evaluate_desired(tr, t - h).R_d.matrix()) / (2 * h);
      const Mat3 skew = d.R_d.matrix().transpose() * r_dot;
      CHECK((Vec3(skew(2, 1), skew(0, 2), skew(1, 0)) - d.Omega_d).norm() < 1e-9);
      const Vec3 om_dot = (evaluate_desired(tr, t + h).Omega_d - evaluate_desired(tr, t - h).Omega_d) / (2 * h);
      CHECK((om_dot - d.Omega_d_dot).norm() < 1e-9);
    }
  }
}

TEST_CASE("max desired rate") {
  CHECK(max_desired_rate(Setpoint{Rotation()}, 10, 0.01) == 0.0);
  const auto traj = tracking_family();
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) worst = std::max(worst, evaluate_desired(traj, i * 0.01).Omega_d.norm());
  CHECK(max_desired_rate(traj, 40, 0.01) == doctest::Approx(worst).epsilon(1e-15));
}

TEST_CASE("tracking errors") {
  std::mt19937_64 rng(40);
  const auto d = evaluate_desired(tracking_family(), 2.0);
  const Rotation r = d.R_d;
  const RigidBodyState on_track{r, d.Omega_d};
  const auto e = compute_tracking_errors(kG, on_track, d);
  CHECK(e.e_R.norm() < 1e-15);
  CHECK(e.e_Omega->norm() < 1e-15);
  CHECK_FALSE(e.e_Omega_bar);

  for (int i = 0; i < 20; ++i) {
    const RigidBodyState body{test::random_rotation(rng), test::random_vec(rng)};
    const auto same = compute_tracking_errors(kG, body, d, body.Omega);
    CHECK((*same.e_Omega_bar - *same.e_Omega).norm() == 0.0);

    // e_Omega_bar = e_Omega - J0^{-1} R^T e_wE, with e_wE = J omega - J omega_bar.
    const Vec3 omega_bar = test::random_vec(rng);
    const Mat3 rm = body.R.matrix();
    const Mat3 j_in = rm * kJ.matrix() * rm.transpose();
    const Vec3 e_wE = j_in * (rm * body.Omega) - j_in * omega_bar;
    const auto est = compute_tracking_errors(kG, body, d, rm.transpose() * omega_bar);
    CHECK((*est.e_Omega_bar - (*est.e_Omega - kJ.inverse() * rm.transpose() * e_wE)).norm() < 1e-12);

    const auto vf = compute_estimated_tracking_errors(kG, body.R, rm.transpose() * omega_bar, d);
    CHECK_FALSE(vf.e_Omega);
    CHECK((*vf.e_Omega_bar - *est.e_Omega_bar).norm() == 0.0);
  }
}

TEST_CASE("chi vector") {
  CHECK(chi_vector(kJ, Vec3::Zero(), Rotation(), Vec3::Zero()) == Vec3::Zero());
  CHECK((chi_vector(kJ, Vec3::Zero(), Rotation(), Vec3(1, 0, 0)) - Vec3(2, 0, 0)).norm() == 0.0);

  std::mt19937_64 rng(41);
  const double omega_max = 1.5;
  const double b1 = chi_offset_bound(kJ, omega_max);
  CHECK(b1 == doctest::Approx(6.0 * omega_max));  // max |2 l_i - 8| = 6 at l = 1
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 e_om = test::random_vec(rng);
    Vec3 om_d = test::random_vec(rng);
    om_d *= omega_max * std::uniform_real_distribution<double>(0, 1)(rng) / om_d.norm();
    const double lhs = chi_vector(kJ, e_om, test::random_rotation(rng), om_d).norm();
    if (lhs > kJ.lambda_max() * e_om.norm() + b1 + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("full-state law") {
  const ControllerGains two{Gain::scalar(2), Gain::scalar(3)};
  const DesiredState rest;
  TrackingErrors zero;
  zero.e_Omega = Vec3::Zero();
  CHECK(pd_control(kJ, two, zero, rest) == Vec3::Zero());

  TrackingErrors p;
  p.e_R = Vec3(0.1, 0, 0);
  p.e_Omega = Vec3::Zero();
  CHECK((pd_control(kJ, two, p, rest) - Vec3(-0.2, 0, 0)).norm() < 1e-16);

  TrackingErrors missing;
  CHECK_THROWS_AS(pd_control(kJ, two, missing, rest), MissingEstimate);
  CHECK_THROWS_AS(velocity_free_control(kJ, two, missing, rest), MissingEstimate);
}

TEST_CASE("full-state law at the detumbling initial state") {
  const Scenario s = stabilization_v_a(ControlMode::FullState);
  const SimState x = initial_state(s);
  const double a = 0.95 * std::sin(std::numbers::pi / 4);
  // -16 J0 e_R - 5.6 J0 Omega(0), with e_R = (a, 0, 0) and no feedforward.
  const Vec3 expected(-80 * a - 28, 8.4, -28);
  CHECK((control_moment(s, x, 0.0) - expected).norm() < 1e-12);
}

TEST_CASE("full-state feedforward against direct arithmetic") {
  std::mt19937_64 rng(42);
  const ControllerGains g{Gain::scalar(4), Gain::scalar(1.5)};
  for (int i = 0; i < 10; ++i) {
    const RigidBodyState body{test::random_rotation(rng), test::random_vec(rng)};
    const auto d = evaluate_desired(tracking_family(), 3.0 * i);
    const auto e = compute_tracking_errors(kG, body, d);
    const Vec3 qw = e.Q * d.Omega_d;
    const Vec3 expected = -4 * e.e_R - 1.5 * *e.e_Omega + kJ.matrix() * (e.Q * d.Omega_d_dot) +
                          qw.cross(kJ.matrix() * qw);
    CHECK((pd_control(kJ, g, e, d) - expected).norm() < 1e-12);
  }
}

TEST_CASE("velocity-free law") {
  std::mt19937_64 rng(43);
  const ControllerGains g{Gain::scalar(4), Gain::scalar(1.5)};
  const auto d = evaluate_desired(tracking_family(), 1.0);
  const RigidBodyState body{test::random_rotation(rng), test::random_vec(rng)};

  auto perfect = compute_tracking_errors(kG, body, d, body.Omega);
  CHECK(velocity_free_control(kJ, g, perfect, d) == pd_control(kJ, g, perfect, d));

  const Vec3 omega_bar = test::random_vec(rng);
  const Mat3 rm = body.R.matrix();
  auto est = compute_tracking_errors(kG, body, d, rm.transpose() * omega_bar);
  const Mat3 j_in = rm * kJ.matrix() * rm.transpose();
  const Vec3 e_wE = j_in * (rm * body.Omega - omega_bar);
  const Vec3 diff = velocity_free_control(kJ, g, est, d) - pd_control(kJ, g, est, d);
  CHECK((diff - 1.5 * kJ.inverse() * rm.transpose() * e_wE).norm() < 1e-12);

  est.e_Omega = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  CHECK(velocity_free_control(kJ, g, est, d).allFinite());

  TrackingErrors zero;
  zero.e_Omega_bar = Vec3::Zero();
  CHECK(velocity_free_control(kJ, g, zero, DesiredState{}) == Vec3::Zero());
}

}
