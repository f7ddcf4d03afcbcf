#pragma once

#include <stdexcept>
#include <string>

namespace so3lab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSkewSymmetric : public Error {
 public:
  using Error::Error;
};

class InvalidRotation : public Error {
 public:
  using Error::Error;
};

class DegenerateMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidWeights : public Error {
 public:
  using Error::Error;
};

class InvalidPsiBound : public Error {
 public:
  using Error::Error;
};

class InvalidGain : public Error {
 public:
  using Error::Error;
};

class InvalidInertia : public Error {
 public:
  using Error::Error;
};

class SingularInertia : public Error {
 public:
  using Error::Error;
};

/// Raised when the velocity-free law is asked to run without an observer estimate,
/// or the full-state law without the true angular velocity.
class MissingEstimate : public Error {
 public:
  using Error::Error;
};

class UncertifiableScenario : public Error {
 public:
  using Error::Error;
};

class InvalidScenario : public Error {
 public:
  using Error::Error;
};

class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace so3lab
