#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "so3lab/errors.hpp"
#include "so3lab/lyapunov.hpp"
#include "test_util.hpp"

using namespace so3lab;

namespace {

const WeightMatrix kGv(1.1, 1.0, 0.9);
const WeightMatrix kGn(0.9, 1.0, 1.1);
const InertiaSpec kJn = InertiaSpec::diagonal(1.0, 1.1, 1.2);

/// Same values as configs/certifiable.yaml.
Scenario near_spherical() {
  Scenario s;
  s.name = "near-spherical";
  s.inertia = kJn;
  s.G = kGn;
  s.G_E = kGn;
  s.controller = {Gain::scalar(1), Gain::scalar(0.5)};
  s.observer = {Gain::scalar(50), Gain::scalar(2)};
  s.R0 = exp_so3(Vec3(0.8, 0, 0));
  s.Omega0 = Vec3(0.2, -0.1, 0.3);
  s.R_bar0 = exp_so3(Vec3(0.8, 0.3, 0));
  s.trajectory = Setpoint{Rotation()};
  s.mode = ControlMode::VelocityFree;
  s.duration = 60;
  s.step = 1e-3;
  s.psi_bar_E = 0.2;
  return s;
}

}  // namespace

TEST_SUITE("lyapunov") {

TEST_CASE("inertia ratio") {
  const auto sphere = check_inertia_ratio(InertiaSpec::diagonal(1, 1, 1), kGv);
  CHECK(sphere.ok);
  CHECK(sphere.lhs == 1.0);
  CHECK(sphere.rhs == doctest::Approx(3.0 / 1.1).epsilon(1e-15));

  const auto preset_ratio = check_inertia_ratio(InertiaSpec::diagonal(5, 1, 2), kGv);
  CHECK_FALSE(preset_ratio.ok);
  CHECK(preset_ratio.lhs == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(std::abs(preset_ratio.rhs - 2.7273) < 1e-4);

  const double d = 1e-3;
  CHECK(check_inertia_ratio(InertiaSpec::diagonal(1, 1.01, 1.02), WeightMatrix(1, 1 + d, 1 + 2 * d)).ok);
}

TEST_CASE("region of attraction") {
  const auto trivial = check_roa(kJn, kGn, 10, 0.0, 0.0, 0.2);
  CHECK(trivial.ok);
  CHECK(trivial.margin_initial == doctest::Approx(0.2));
  CHECK(trivial.margin_velocity == doctest::Approx(2.0));

  CHECK_THROWS_AS(check_roa(InertiaSpec::diagonal(5, 1, 2), kGv, 10, 0.0, 0.0, 0.2), UncertifiableScenario);

  const auto third = check_roa(kJn, kGn, 10, 0.1, std::sqrt(0.5), 0.2);
  CHECK(third.ok);
  CHECK(third.margin_velocity == doctest::Approx(0.5).epsilon(1e-12));
  // cap = min{n1, (3.0 - 1.2 * 1.1) / 2} = 0.84
  CHECK(third.psi_bar_E_max == doctest::Approx(0.84).epsilon(1e-14));
  CHECK_FALSE(check_roa(kJn, kGn, 10, 0.1, std::sqrt(1.5), 0.2).ok);
  CHECK_FALSE(check_roa(kJn, kGn, 10, 0.1, 0.0, 0.9).ok);
}

TEST_CASE("b constants") {
  const auto [b1, b2] = controller_b_constants(kGv, 1.8);
  CHECK(b1 == doctest::Approx(1.9 / 4.45));
  CHECK(b2 == doctest::Approx(1.9 * 2.1 / (3.61 * 0.1)));
  CHECK_THROWS_AS(controller_b_constants(kGv, 1.9), InvalidPsiBound);
}

TEST_CASE("leading-minor test agrees with eigenvalues") {
  std::mt19937_64 rng(50);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    Mat2 m;
    m << n(rng), n(rng), 0.0, n(rng);
    m(1, 0) = m(0, 1);
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    const bool pd = es.eigenvalues().minCoeff() > 0.0;
    if (std::abs(es.eigenvalues().minCoeff()) > 1e-12) CHECK(is_positive_definite(m) == pd);
  }
}

TEST_CASE("bound matrices in the c = 0 limit") {
  const ScalarGains k{1, 0.5, 50, 2};
  const auto b = bound_matrices(kJn, kGn, kGn, k, 1.7, 0.2, 0.0, 0.0, 0.0);
  CHECK(b.M[0](0, 1) == 0.0);
  CHECK(b.M[1](0, 1) == 0.0);
  CHECK(b.M[0](0, 0) == doctest::Approx(0.5));
  CHECK(b.M[0](1, 1) == doctest::Approx(b.k.b1 * 1.0));
  CHECK(b.W[1](0, 0) == 0.0);
  CHECK(b.W[1](1, 1) == 0.0);
  CHECK_FALSE(b.all_pd);
}

TEST_CASE("c2 above the M3 cap breaks positive definiteness") {
  const ScalarGains k{1, 0.5, 50, 2};
  // M3 = 1/2 [[k_E 2 n1/(n2+n3), -c2], [-c2, 2]] is singular at c2^2 = 4 k_E n1/(n2+n3).
  const double n1 = 1.9, n2 = 0.04, n3 = 4.41;
  const double c2_crit = std::sqrt(4 * 50 * n1 / (n2 + n3));
  CHECK(is_positive_definite(bound_matrices(kJn, kGn, kGn, k, 1.7, 0.2, 0.01, 0.99 * c2_crit, 0).M[2]));
  CHECK_FALSE(is_positive_definite(bound_matrices(kJn, kGn, kGn, k, 1.7, 0.2, 0.01, 1.01 * c2_crit, 0).M[2]));
}

TEST_CASE("equal gains of ten admit no constants") {
  const ScalarGains k{10, 10, 10, 10};
  const double psi = 0.9 * kGn.n1();
  const auto b = bound_matrices(kJn, kGn, kGn, k, psi, 0.2, 0.01, 0.01, 0.0);
  CHECK_FALSE(b.all_pd);
  // W3 = 1/2 [[B3, -k_Omega/lm], [., c2 A_E / (3 lM lm)]] evaluated by hand.
  const double lm = 1.0, lM = 1.2;
  const double B2 = 0.5 * std::sqrt(12 * 0.04 + 3 * 4.41);
  const double B3 = 10 - 0.5 * 0.01 * lM * (std::sqrt(2.0) * 3.0 + B2);
  const double A_E = (3.0 - 0.4) * lm - 1.1 * lM;
  const double det = B3 * 0.01 * A_E / (3 * lM * lm) - 100.0 / (lm * lm);
  CHECK(det < 0.0);
  CHECK(b.W[2].determinant() == doctest::Approx(0.25 * det).epsilon(1e-12));
  CHECK_FALSE(choose_constants(kJn, kGn, kGn, k, psi, 0.2, 0.0));
}

TEST_CASE("unit gains on a sphere admit no constants") {
  const ScalarGains k{1, 1, 1, 1};
  CHECK_FALSE(choose_constants(InertiaSpec::diagonal(1, 1, 1), kGv, kGv, k, 1.7, 0.5, 0.0));
}

TEST_CASE("detumbling plant is infeasible") {
  const ScalarGains k{10, 10, 10, 10};
  CHECK_FALSE(choose_constants(InertiaSpec::diagonal(5, 1, 2), kGv, kGv, k, 1.7, 0.1, 0.0));
}

TEST_CASE("certifiable scenario") {
  const Scenario s = near_spherical();
  const auto c = certify(s);
  CHECK(c.verdict == Verdict::Certified);
  REQUIRE(c.constants);
  CHECK(c.constants->c1 == doctest::Approx(0.015999406400351461).epsilon(1e-12));
  CHECK(c.constants->c2 == doctest::Approx(1.6666666666666683).epsilon(1e-12));
  REQUIRE(c.bounds);
  for (const Mat2& m : c.bounds->M) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  for (const Mat2& m : c.bounds->W) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }

  Scenario sd = s;
  sd.decimation = 10;
  const TrajectoryLog log = run(sd);
  const auto trace = lyapunov_trace(sd, log, *c.constants, *c.bounds, c.psi, c.psi_bar_E);
  int rises = 0, outside = 0, sandwich = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (!trace[k].in_domain) ++outside;
    if (!trace[k].sandwich_c || !trace[k].sandwich_o) ++sandwich;
    if (k > 0 && trace[k].V > trace[k - 1].V + 1e-6 * (1 + trace[k - 1].V)) ++rises;
  }
  CHECK(rises == 0);
  CHECK(outside == 0);
  CHECK(sandwich == 0);
  CHECK(trace.back().V < 1e-6 * trace.front().V);
  CHECK(certify(sd, &log).verdict == Verdict::Certified);
}

TEST_CASE("all-zero-error log") {
  Scenario s = near_spherical();
  s.R0 = Rotation();
  s.R_bar0 = Rotation();
  s.Omega0.setZero();
  s.duration = 0.01;
  const auto c = certify(near_spherical());
  for (const auto& y : lyapunov_trace(s, run(s), *c.constants, *c.bounds, c.psi, c.psi_bar_E)) {
    CHECK(y.V == 0.0);
    CHECK(y.U == 0.0);
  }
}

TEST_CASE("verdicts") {
  const auto va = certify(stabilization_v_a());
  CHECK(va.verdict == Verdict::Uncertifiable);
  CHECK(va.ratio.lhs == doctest::Approx(5.0));
  CHECK(format_certificate(va).find("verdict=UNCERTIFIABLE\n") != std::string::npos);

  RunOptions lean;
  lean.store_samples = false;
  const TrajectoryLog sim = run(stabilization_v_a(), lean);
  CHECK(certify(stabilization_v_a(), &sim).verdict == Verdict::UncertifiedConvergent);

  Scenario drift = stabilization_v_a(ControlMode::OpenLoop);
  drift.duration = 5;
  const TrajectoryLog open = run(drift, lean);
  CHECK(certify(drift, &open).verdict == Verdict::Divergent);

  Scenario matrix = near_spherical();
  matrix.observer.k_E = Gain::matrix(50 * kJn.matrix());
  const auto mc = certify(matrix);
  CHECK(mc.verdict == Verdict::Uncertifiable);
  CHECK_FALSE(mc.scalar_gains);
}

TEST_CASE("exponential fit") {
  TrajectoryLog log;
  for (int i = 0; i <= 100; ++i) {
    LogSample l;
    l.t = 0.1 * i;
    l.e_R = Vec3(3.0 * std::exp(-0.5 * l.t), 0, 0);
    log.samples.push_back(l);
  }
  const auto f = fit_exponential_rate(log, 1.0, 9.0);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.points == 81);
}

}
