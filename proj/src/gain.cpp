#include "so3lab/gain.hpp"

#include <cmath>
#include <sstream>

#include "so3lab/errors.hpp"

namespace so3lab {

Gain Gain::scalar(double k) {
  if (!std::isfinite(k) || k <= 0.0) throw InvalidGain("scalar gain must be finite and positive");
  return Gain(k * Mat3::Identity(), true);
}

Gain Gain::matrix(const Mat3& k) {
  if (!k.allFinite()) throw InvalidGain("matrix gain has non-finite entries");
  if ((k - k.transpose()).norm() > 1e-12 * (1.0 + k.norm())) {
    throw InvalidGain("matrix gain must be symmetric");
  }
  if (symmetric_eigenvalues(k)[0] <= 0.0) throw InvalidGain("matrix gain must be positive definite");
  return Gain(k, false);
}

double Gain::scalar_value() const {
  if (!scalar_) throw InvalidGain("gain is matrix-valued; a scalar was required");
  return m_(0, 0);
}

Mat3 Gain::inverse() const { return m_.inverse(); }

double Gain::min_eigenvalue() const { return symmetric_eigenvalues(m_)[0]; }
double Gain::max_eigenvalue() const { return symmetric_eigenvalues(m_)[2]; }

std::string Gain::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (scalar_) {
    os << m_(0, 0);
  } else {
    os << "[[" << m_(0, 0) << "," << m_(0, 1) << "," << m_(0, 2) << "],[" << m_(1, 0) << ","
       << m_(1, 1) << "," << m_(1, 2) << "],[" << m_(2, 0) << "," << m_(2, 1) << "," << m_(2, 2)
       << "]]";
  }
  return os.str();
}

}  // namespace so3lab
