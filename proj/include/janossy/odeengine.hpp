#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace janossy {

using StateVector = Eigen::VectorXcd;
using RhsFunction = std::function<void(double s, const StateVector& y, StateVector& dy)>;

struct OdeProblem {
  RhsFunction rhs;
  double s0 = 0.0;
  double s1 = 1.0;
  StateVector y0;
  double rtol = 1e-11;
  double atol = 1e-14;
  /// Optional per-component absolute tolerances; overrides atol when set.
  Eigen::VectorXd atol_components;
  long max_steps = 10'000'000;
};

/// Accepted steps of an embedded 5(4) Runge-Kutta integration with a
/// continuous extension of order 4 on each step.
struct Trajectory {
  std::vector<double> nodes;
  std::vector<StateVector> states;
  // per-step interpolation coefficients
  std::vector<std::array<StateVector, 5>> dense;
  std::vector<double> error_estimates;  // scaled error norm of each accepted step
  long rhs_evaluations = 0;
  long rejected_steps = 0;

  double begin() const { return nodes.front(); }
  double end() const { return nodes.back(); }
  std::size_t steps() const { return dense.size(); }
};

Trajectory integrate(const OdeProblem& problem);

/// Continuous extension at s; returns the stored state at accepted nodes.
StateVector eval_dense(const Trajectory& trajectory, double s);

}  // namespace janossy
