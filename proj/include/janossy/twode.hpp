#pragma once

#include <array>
#include <vector>

#include "janossy/kernel.hpp"
#include "janossy/odeengine.hpp"

namespace janossy {

enum class TWFamily { airy, bessel };

/// Conditioned connection coefficients driving the first-order system for a
/// single locus. Airy-type: m = (x-t)^2, Bessel-type: m = x (x-t)^2.
struct TWSystemSpec {
  TWFamily family;
  std::array<cplx, 3> alpha;  // A~
  std::array<cplx, 3> beta;   // B~
  std::array<cplx, 4> gamma;  // C~
  cplx t;
  double nu = 0.0;
  KernelSpec kernel;  // the conditioned kernel, for boundary data
};

struct TWState {
  cplx q0, p0;
  std::array<cplx, 3> u, v;
  std::array<cplx, 2> w;
  cplx logdet;  // running integral of R

  static constexpr int kSize = 11;
  StateVector pack() const;
  static TWState unpack(const StateVector& y);
};

struct TWClosure {
  cplx q1, q2, q3, p1, p2;
  std::array<cplx, 3> vt;
};

TWSystemSpec build_system(const KernelSpec& conditioned);

TWClosure algebraic_closure(const TWSystemSpec& sys, cplx s, const TWState& st);

/// Derivative of the state with respect to s (s may be complex).
TWState rhs(const TWSystemSpec& sys, cplx s, const TWState& st);

/// q0, p0 and moment integrals at the cutoff (Airy: tail (cutoff, inf),
/// Bessel: (0, cutoff)).
TWState boundary_state(const TWSystemSpec& sys, double cutoff);

struct TWSolveOptions {
  double cutoff = 0.0;        // Lambda (Airy) or mu (Bessel)
  double radius = 0.1;        // circle around the locus
  int circle_nodes = 256;
  double rtol = 1e-12;
  double state_atol = 1e-30;
  double logdet_atol = 1e-22;
};

TWSolveOptions default_solve_options(TWFamily family);

struct TWPoint {
  double s = 0.0;
  double R = 0.0;         // diagonal resolvent at the moving endpoint
  double integral = 0.0;  // integral of R over the interval, equal to -log Det
  double q0 = 0.0;
  double p0 = 0.0;
};

struct TWSolution {
  std::vector<TWPoint> points;  // in the order of the requested targets
  double max_imag_residue = 0.0;
  bool imag_warning = false;    // residue above 1e-5
  bool crossed_locus = false;
  cplx q0_at_locus, p0_at_locus;  // only when crossed_locus
  double max_abs_q0 = 0.0;
  double max_abs_p0 = 0.0;
  long rhs_evaluations = 0;
};

TWSolution solve(const TWSystemSpec& sys, const std::vector<double>& targets,
                 const TWSolveOptions& options);
TWSolution solve(const TWSystemSpec& sys, const std::vector<double>& targets);

}  // namespace janossy
