#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvxkit {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// linalg
struct NotSymmetricError : Error {
  using Error::Error;
};
struct SingularKktError : Error {
  using Error::Error;
};

// model
struct OutOfDomainError : Error {
  using Error::Error;
};
struct UnknownNameError : Error {
  using Error::Error;
};
struct BadParamsError : Error {
  using Error::Error;
};

// barrier
class NotStrictlyFeasibleError : public Error {
 public:
  NotStrictlyFeasibleError(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}

  /// Index of the first violated inequality constraint.
  std::size_t constraint_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};
struct NotCenteredError : Error {
  using Error::Error;
};

// newton
struct NoDescentError : Error {
  using Error::Error;
};
struct LineSearchStallError : Error {
  using Error::Error;
};
struct InfeasibleStartError : Error {
  using Error::Error;
};

// solver
struct SolverFailureError : Error {
  using Error::Error;
};

// geometry
struct DegeneratePointError : Error {
  using Error::Error;
};
struct NotSeparableError : Error {
  using Error::Error;
};
struct InfeasibleCandidateError : Error {
  using Error::Error;
};

// io / cli
struct ValidationError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

}  // namespace cvxkit
