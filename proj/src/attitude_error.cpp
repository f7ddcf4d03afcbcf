#include "so3lab/attitude_error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "so3lab/errors.hpp"

namespace so3lab {

WeightMatrix::WeightMatrix(double e1, double e2, double e3) : eps_{e1, e2, e3} {
  for (double e : eps_) {
    if (!std::isfinite(e) || e <= 0.0) throw InvalidWeights("weights must be finite and positive");
  }
  if (e1 == e2 || e2 == e3 || e3 == e1) throw InvalidWeights("weights must be distinct");

  const std::array<double, 3> sums{e1 + e2, e2 + e3, e3 + e1};
  const std::array<double, 3> diffs{e1 - e2, e2 - e3, e3 - e1};
  const auto sq = [](double x) { return x * x; };
  n_[0] = *std::min_element(sums.begin(), sums.end());
  n_[1] = std::max({sq(diffs[0]), sq(diffs[1]), sq(diffs[2])});
  n_[2] = std::max({sq(sums[0]), sq(sums[1]), sq(sums[2])});
  n_[3] = *std::max_element(sums.begin(), sums.end());
  n_[4] = std::min({sq(sums[0]), sq(sums[1]), sq(sums[2])});
}

double WeightMatrix::norm() const { return *std::max_element(eps_.begin(), eps_.end()); }

double WeightMatrix::pair_sum_excluding(int i) const {
  if (i < 1 || i > 3) throw Error("pair_sum_excluding: index must be 1, 2 or 3");
  return trace() - eps_[static_cast<std::size_t>(i - 1)];
}

double error_function(const WeightMatrix& w, const Rotation& q) {
  const Mat3& m = q.matrix();
  const double cos_angle = 0.5 * (m.trace() - 1.0);
  if (cos_angle <= 0.0) return 0.5 * (w.matrix() * (Mat3::Identity() - m)).trace();
  // Near the identity 1 - Q_ii cancels. With s = sin(angle) n taken from the skew
  // part, I - sym(Q) = (|s|^2 I - s s^T) / (1 + cos(angle)).
  const Vec3 s(0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1)));
  const Vec3 ws(w[0] * s.x(), w[1] * s.y(), w[2] * s.z());
  return 0.5 * (s.squaredNorm() * w.trace() - s.dot(ws)) / (1.0 + cos_angle);
}

Vec3 estimation_error_vector(const WeightMatrix& w, const Rotation& q_e) {
  const Mat3 g = w.matrix();
  const Mat3& q = q_e.matrix();
  // The argument is skew by construction; the tolerance only absorbs round-off.
  return 0.5 * vee(q * g - g * q.transpose(), 1e-6);
}

Vec3 tracking_error_vector(const WeightMatrix& w, const Rotation& q) {
  const Mat3 g = w.matrix();
  const Mat3& m = q.matrix();
  return 0.5 * vee(g * m.transpose() - m * g, 1e-6);
}

Mat3 observer_error_matrix(const WeightMatrix& w, const Rotation& q_e) {
  const Mat3 g = w.matrix();
  const Mat3& q = q_e.matrix();
  const Vec3 e = estimation_error_vector(w, q_e);
  return 0.5 * ((q * g).trace() * Mat3::Identity() - 2.0 * hat(e) - g * q.transpose());
}

Mat3 tracking_error_matrix(const WeightMatrix& w, const Rotation& q) {
  const Mat3 qg = q.matrix() * w.matrix();
  return 0.5 * (qg.trace() * Mat3::Identity() - qg);
}

QuadraticBounds quadratic_bounds(const WeightMatrix& w, double psi_cap, const Rotation& q) {
  if (!(psi_cap > 0.0) || psi_cap >= w.n1()) {
    std::ostringstream os;
    os << "quadratic_bounds: psi = " << psi_cap << " must lie in (0, n1 = " << w.n1() << ")";
    throw InvalidPsiBound(os.str());
  }
  const double e2 = estimation_error_vector(w, q).squaredNorm();
  QuadraticBounds b{};
  b.psi = error_function(w, q);
  b.lower = w.n1() / (w.n2() + w.n3()) * e2;
  b.upper = w.n1() * w.n4() / (w.n5() * (w.n1() - psi_cap)) * e2;
  b.holds = b.lower <= b.psi && (b.psi >= psi_cap || b.psi <= b.upper);
  return b;
}

}  // namespace so3lab
