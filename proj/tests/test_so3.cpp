#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "so3lab/errors.hpp"
#include "so3lab/so3.hpp"
#include "test_util.hpp"

using namespace so3lab;
using so3lab::test::max_abs;

TEST_SUITE("so3") {

TEST_CASE("hat of basis vector and zero") {
  Mat3 expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(hat(Vec3::UnitX()) == expected);
  CHECK(hat(Vec3::Zero()) == Mat3::Zero());
}

TEST_CASE("hat matches the componentwise cross product") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = test::random_vec(rng), w = test::random_vec(rng);
    const Vec3 cross(v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0]);
    CHECK((hat(v) * w - cross).norm() < 1e-15);
  }
}

TEST_CASE("vee") {
  const Vec3 v(1, -1.5, 2.5);
  CHECK(vee(hat(v)) == v);
  CHECK(vee(Mat3::Zero()) == Vec3::Zero());
  CHECK_THROWS_AS(vee(Mat3::Identity()), NotSkewSymmetric);
}

TEST_CASE("exp_so3 special values") {
  CHECK(exp_so3(Vec3::Zero()).matrix() == Mat3::Identity());
  const double s = std::sqrt(2.0) / 2.0;
  Mat3 rx;
  rx << 1, 0, 0, 0, s, -s, 0, s, s;
  CHECK(max_abs(exp_so3(Vec3(std::numbers::pi / 4, 0, 0)).matrix() - rx) < 1e-15);
  CHECK(max_abs(exp_so3(Vec3(2 * std::numbers::pi, 0, 0)).matrix() - Mat3::Identity()) < 1e-12);
}

TEST_CASE("exp_so3 agrees with Eigen AngleAxis") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = test::random_vec(rng, i % 2 ? 2.0 : 1e-9);
    const Mat3 ref = v.norm() > 0 ? Eigen::AngleAxisd(v.norm(), v.normalized()).toRotationMatrix() : Mat3::Identity();
    CHECK(max_abs(exp_so3(v).matrix() - ref) < 1e-14);
  }
}

TEST_CASE("project_to_rotation") {
  std::mt19937_64 rng(3);
  const Rotation r = test::random_rotation(rng);
  CHECK(max_abs(project_to_rotation(r.matrix()).matrix() - r.matrix()) < 1e-12);
  CHECK(max_abs(project_to_rotation(1.001 * Mat3::Identity()).matrix() - Mat3::Identity()) < 1e-15);

  for (int i = 0; i < 50; ++i) {
    const Rotation q = test::random_rotation(rng);
    const Mat3 m = q.matrix() + 1e-6 * Mat3::Random();
    // SVD polar factor as the oracle.
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 polar = svd.matrixU() * svd.matrixV().transpose();
    const Mat3 p = project_to_rotation(m).matrix();
    CHECK(max_abs(p - polar) < 1e-13);
    CHECK((p - q.matrix()).norm() < 2e-6);
    CHECK(orthogonality_residual(p) < 1e-14);
  }
  CHECK_THROWS_AS(project_to_rotation(-Mat3::Identity()), DegenerateMatrix);
}

TEST_CASE("Rotation rejects non-rotations") {
  CHECK_THROWS_AS(Rotation(2.0 * Mat3::Identity()), InvalidRotation);
  CHECK_THROWS_AS(Rotation(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()), InvalidRotation);
}

TEST_CASE("euler321_rotation") {
  CHECK(max_abs(euler321_rotation(0, 0, 0).matrix() - Mat3::Identity()) == 0.0);
  CHECK(max_abs(euler321_rotation(0, 0, std::numbers::pi / 4).matrix() -
                exp_so3(Vec3(std::numbers::pi / 4, 0, 0)).matrix()) < 1e-15);
  Mat3 rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(max_abs(euler321_rotation(std::numbers::pi / 2, 0, 0).matrix() - rz) < 1e-15);

  const double a = 0.3, b = -0.7, c = 1.9;
  const Mat3 ref = (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
                    Eigen::AngleAxisd(c, Vec3::UnitX()))
                       .toRotationMatrix();
  CHECK(max_abs(euler321_rotation(a, b, c).matrix() - ref) < 1e-15);
}

TEST_CASE("symmetric eigenvalues agree with shifted singular values") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    Mat3 a = Mat3::Random();
    Mat3 s = a + a.transpose();
    if (i % 3 == 0) s = Vec3(5, 1, 2).asDiagonal();
    if (i % 3 == 1) {
      const Mat3 r = test::random_rotation(rng).matrix();
      s = r * Vec3(2, 2, 7).asDiagonal() * r.transpose();
    }
    s = (0.5 * (s + s.transpose())).eval();
    // s + c I is positive definite, so its singular values are the shifted eigenvalues.
    const double c = 1.0 + s.norm();
    Eigen::JacobiSVD<Mat3> svd(s + c * Mat3::Identity());
    const auto ev = symmetric_eigenvalues(s);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(ev[k] - (svd.singularValues()[2 - k] - c)) < 1e-13 * c);
  }
  Mat3 m = Mat3::Random();
  Eigen::JacobiSVD<Mat3> svd(m);
  CHECK(std::abs(spectral_norm(m) - svd.singularValues()[0]) < 1e-12);
}

TEST_CASE("undesired equilibria") {
  CHECK(undesired_equilibrium(1).matrix() == Vec3(1, -1, -1).asDiagonal().toDenseMatrix());
  CHECK(undesired_equilibrium(2).matrix() == Vec3(-1, 1, -1).asDiagonal().toDenseMatrix());
  CHECK(undesired_equilibrium(3).matrix() == Vec3(-1, -1, 1).asDiagonal().toDenseMatrix());
}

}
