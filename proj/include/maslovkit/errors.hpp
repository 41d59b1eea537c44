#pragma once

#include <stdexcept>
#include <string>

namespace maslovkit {

enum class ErrorKind {
  Shape,
  NotInChart,
  ChartBoundary,
  Invariant,
  UndersampledLoop,
  NonGeneric,
  TangentialCrossing,
  NotImmersion,
  SingularMultiplier,
  Convergence,
  Integration,
  Inconclusive,
  Family,
};

const char* to_string(ErrorKind kind);

// All domain failures raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace maslovkit
