#pragma once

#include <stdexcept>
#include <string>

namespace swdro {

enum class ErrorKind {
  NegativeWeight,
  ZeroTotalMass,
  DimensionMismatch,
  NotAProbabilityVector,
  CapExceeded,
  UnboundedPolytope,
  EmptyTheta,
  EmptyGrid,
  OutOfDomain,
  SolverFailure,
  NumericalFailure,
  ParseError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// All library errors carry a machine-readable kind; the CLI maps kinds to
/// exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace swdro
