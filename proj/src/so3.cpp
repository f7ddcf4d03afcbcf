#include "so3lab/so3.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "so3lab/errors.hpp"

namespace so3lab {

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m, double tol) {
  const Mat3 sym = 0.5 * (m + m.transpose());
  if (sym.norm() > tol) {
    std::ostringstream os;
    os << "vee: symmetric part has norm " << sym.norm() << " > " << tol;
    throw NotSkewSymmetric(os.str());
  }
  const Mat3 skew = 0.5 * (m - m.transpose());
  return Vec3(skew(2, 1), skew(0, 2), skew(1, 0));
}

double orthogonality_residual(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm();
}

Rotation::Rotation(const Mat3& m, double tol) : m_(m) {
  if (!m.allFinite()) throw InvalidRotation("rotation has non-finite entries");
  const double ortho = orthogonality_residual(m);
  const double det = m.determinant();
  if (ortho > tol || std::abs(det - 1.0) > tol) {
    std::ostringstream os;
    os << "matrix is not a rotation: ||R^T R - I|| = " << ortho << ", det = " << det;
    throw InvalidRotation(os.str());
  }
}

Rotation Rotation::from_trusted(const Mat3& m) { return Rotation(m, Trusted{}); }

Rotation exp_so3(const Vec3& v) {
  const double theta = v.norm();
  const Mat3 k = hat(v);
  if (theta < kSmallAngle) {
    return Rotation::from_trusted(Mat3::Identity() + k + 0.5 * k * k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Rotation::from_trusted(Mat3::Identity() + a * k + b * k * k);
}

Rotation project_to_rotation(const Mat3& m) {
  if (!m.allFinite()) throw DegenerateMatrix("project_to_rotation: non-finite input");
  const double scale = m.norm();
  const double det = m.determinant();
  if (scale == 0.0 || det <= 1e-12 * scale * scale * scale) {
    std::ostringstream os;
    os << "project_to_rotation: det = " << det << " (need a positive, non-degenerate matrix)";
    throw DegenerateMatrix(os.str());
  }
  // Newton iteration for the orthogonal polar factor with determinant scaling
  // (Higham). Quadratic convergence from any nonsingular start.
  Mat3 x = m;
  for (int iter = 0; iter < 100; ++iter) {
    const Mat3 inv_t = x.inverse().transpose();
    const double g = std::cbrt(std::abs(1.0 / x.determinant()));
    const Mat3 next = 0.5 * (g * x + inv_t / g);
    const double change = (next - x).norm();
    x = next;
    if (change < 1e-15) break;
  }
  // One unscaled step polishes the last bits.
  x = 0.5 * (x + x.inverse().transpose());
  return Rotation::from_trusted(x);
}

Rotation euler321_rotation(double yaw, double pitch, double roll) {
  const double ca = std::cos(yaw), sa = std::sin(yaw);
  const double cb = std::cos(pitch), sb = std::sin(pitch);
  const double cg = std::cos(roll), sg = std::sin(roll);
  Mat3 rz, ry, rx;
  rz << ca, -sa, 0, sa, ca, 0, 0, 0, 1;
  ry << cb, 0, sb, 0, 1, 0, -sb, 0, cb;
  rx << 1, 0, 0, 0, cg, -sg, 0, sg, cg;
  return Rotation::from_trusted(rz * ry * rx);
}

std::array<double, 3> symmetric_eigenvalues(const Mat3& s) {
  const Eigen::SelfAdjointEigenSolver<Mat3> es(s, Eigen::EigenvaluesOnly);
  const Vec3& ev = es.eigenvalues();
  return {ev[0], ev[1], ev[2]};
}

double spectral_norm(const Mat3& m) {
  const auto eig = symmetric_eigenvalues(m.transpose() * m);
  return std::sqrt(std::max(eig[2], 0.0));
}

Rotation undesired_equilibrium(int index) {
  Vec3 d(-1.0, -1.0, -1.0);
  if (index < 1 || index > 3) throw Error("undesired equilibrium index must be 1, 2 or 3");
  d[index - 1] = 1.0;
  return Rotation::from_trusted(d.asDiagonal());
}

}  // namespace so3lab
