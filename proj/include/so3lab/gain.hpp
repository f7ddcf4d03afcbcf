#pragma once

#include <string>

#include "so3lab/so3.hpp"

namespace so3lab {

/// A feedback gain that is either a positive scalar or a symmetric positive
/// definite 3x3 matrix. Matrix gains act by matrix-vector multiplication
/// wherever a scalar gain would multiply a vector.
class Gain {
 public:
  static Gain scalar(double k);
  static Gain matrix(const Mat3& k);

  bool is_scalar() const { return scalar_; }
  /// The scalar value. Throws InvalidGain for matrix gains.
  double scalar_value() const;
  const Mat3& as_matrix() const { return m_; }
  Mat3 inverse() const;
  /// A representative magnitude, tr(K)/3. Equals k for scalar gains.
  double scale() const { return m_.trace() / 3.0; }
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  std::string describe() const;

 private:
  Gain(const Mat3& m, bool scalar) : m_(m), scalar_(scalar) {}
  Mat3 m_;
  bool scalar_;
};

}  // namespace so3lab
