#pragma once

#include <stdexcept>
#include <string>

namespace ksns {

/// Rejected input: bad grid sizes, negative densities, out-of-range parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solve stopped before reaching its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                           ", relative residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Time step larger than the explicit stability bound of the update.
class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step produced a state that violates positivity, finiteness or incompressibility.
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ksns
