#pragma once

#include <stdexcept>
#include <string>

namespace janossy {

// Precondition violations: arguments outside a documented window.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterations that fail to converge (eigensolves, quadrature, ODE steps).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular systems or evaluation exactly at a pole.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace janossy
