#pragma once

#include <stdexcept>
#include <string>

namespace qds {

// Numeric values are part of the C API (see qdshield.h) and must stay stable.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Domain = 2,
  StateCorruption = 3,
  PositivityViolation = 4,
  NumericalFailure = 5,
  InternalConsistency = 6,
  IntegrationAbort = 7,
  Io = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::InvalidArgument, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::Domain, what) {}
};

class StateCorruption : public Error {
 public:
  explicit StateCorruption(const std::string& what)
      : Error(ErrorCode::StateCorruption, what) {}
};

class PositivityViolation : public Error {
 public:
  PositivityViolation(const std::string& what, double eigenvalue)
      : Error(ErrorCode::PositivityViolation, what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double estimate)
      : Error(ErrorCode::NumericalFailure, what), estimate_(estimate) {}
  // Achieved error estimate or best value found, depending on the raiser.
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class InternalConsistency : public Error {
 public:
  explicit InternalConsistency(const std::string& what)
      : Error(ErrorCode::InternalConsistency, what) {}
};

class IntegrationAbort : public Error {
 public:
  IntegrationAbort(const std::string& what, double time, double eigenvalue)
      : Error(ErrorCode::IntegrationAbort, what),
        time_(time),
        eigenvalue_(eigenvalue) {}
  double time() const noexcept { return time_; }
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double time_;
  double eigenvalue_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace qds
