#pragma once

#include "so3lab/so3.hpp"

namespace so3lab {

/// Diagonal weight matrix diag(e1, e2, e3) with distinct positive entries, used
/// both for the tracking weights G and the observer weights G_E.
///
/// The derived constants n1..n5 bound the error function by the squared norm of
/// the error vector (see quadratic_bounds):
///   n1 = min pair sum,      n4 = max pair sum,
///   n2 = max pair diff^2,   n3 = max pair sum^2,   n5 = min pair sum^2.
class WeightMatrix {
 public:
  WeightMatrix(double e1, double e2, double e3);

  double operator[](int i) const { return eps_[static_cast<std::size_t>(i)]; }
  Mat3 matrix() const { return Vec3(eps_[0], eps_[1], eps_[2]).asDiagonal(); }
  double trace() const { return eps_[0] + eps_[1] + eps_[2]; }
  /// Spectral norm, max e_i.
  double norm() const;

  /// e_j + e_k for the pair that excludes index i (1-based); this is the value
  /// of the error function at the undesired equilibrium D_i.
  double pair_sum_excluding(int i) const;

  double n1() const { return n_[0]; }
  double n2() const { return n_[1]; }
  double n3() const { return n_[2]; }
  double n4() const { return n_[3]; }
  double n5() const { return n_[4]; }

 private:
  std::array<double, 3> eps_;
  std::array<double, 5> n_;
};

/// Psi = 1/2 tr[W (I - Q)]
double error_function(const WeightMatrix& w, const Rotation& q);

/// e_RE = 1/2 (Q_E G_E - G_E Q_E^T)^vee
Vec3 estimation_error_vector(const WeightMatrix& w, const Rotation& q_e);

/// e_R = 1/2 (G Q^T - Q G)^vee; equal to -estimation_error_vector(w, q).
Vec3 tracking_error_vector(const WeightMatrix& w, const Rotation& q);

/// E_o with d/dt e_RE = E_o omega_E:
///   E_o = 1/2 (tr[Q_E G_E] I - 2 hat(e_RE) - G_E Q_E^T) = 1/2 (tr[Q_E G_E] I - Q_E G_E)
Mat3 observer_error_matrix(const WeightMatrix& w, const Rotation& q_e);

/// E_c with d/dt e_R = E_c e_Omega: E_c = 1/2 (tr[Q G] I - Q G)
Mat3 tracking_error_matrix(const WeightMatrix& w, const Rotation& q);

struct QuadraticBounds {
  double lower;
  double upper;
  double psi;
  bool holds;
};

/// Evaluates n1/(n2+n3) ||e||^2 <= Psi and, when Psi < psi_cap,
/// Psi <= n1 n4 / (n5 (n1 - psi_cap)) ||e||^2.
/// Throws InvalidPsiBound unless 0 < psi_cap < n1.
QuadraticBounds quadratic_bounds(const WeightMatrix& w, double psi_cap, const Rotation& q);

}  // namespace so3lab
