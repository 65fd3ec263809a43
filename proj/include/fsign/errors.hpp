#pragma once

#include <stdexcept>
#include <string>

namespace fsign {

// Base for all library errors. exit_code() maps onto the CLI convention:
// 2 for invalid arguments/configuration, 3 for numerical failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const noexcept { return 3; }
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
  int exit_code() const noexcept override { return 2; }
};

class IncompatibleGrids : public Error {
 public:
  explicit IncompatibleGrids(const std::string& what) : Error(what) {}
  int exit_code() const noexcept override { return 2; }
};

// A residual with (numerically) zero norm where the estimator requires
// every residual to be bounded away from the center.
class DegenerateObservation : public Error {
 public:
  explicit DegenerateObservation(const std::string& what) : Error(what) {}
};

class NotSelfAdjoint : public Error {
 public:
  explicit NotSelfAdjoint(const std::string& what) : Error(what) {}
};

class AmbiguousAlignment : public Error {
 public:
  explicit AmbiguousAlignment(const std::string& what) : Error(what) {}
};

class DegenerateEigenvalue : public Error {
 public:
  explicit DegenerateEigenvalue(const std::string& what) : Error(what) {}
};

class InsufficientRank : public Error {
 public:
  explicit InsufficientRank(const std::string& what) : Error(what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(what) {}
};

}  // namespace fsign
