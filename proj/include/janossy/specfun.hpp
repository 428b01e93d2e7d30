#pragma once

#include <complex>
#include <vector>

namespace janossy {

using cplx = std::complex<double>;

/// Airy function Ai(x). Valid for |x| <= 200; throws DomainError otherwise.
double airy_ai(double x);
/// Derivative Ai'(x), same validity window as airy_ai.
double airy_ai_prime(double x);

/// Bessel function of the first kind J_nu(x) for real order nu > -1 and
/// 0 <= x <= 1e4.
double bessel_j(double nu, double x);
/// dJ_nu/dx = (J_{nu-1}(x) - J_{nu+1}(x)) / 2.
double bessel_j_prime(double nu, double x);

/// Gauss-Legendre rule mapped onto (lo, hi).
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, interior to (lo, hi)
  std::vector<double> weights;  // positive, summing to hi - lo
  int order = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// M-point Gauss-Legendre rule on (lo, hi). Roots of P_M are found by damped
/// Newton iteration from the Chebyshev-type initial guesses.
QuadratureRule gauss_legendre(int order, double lo, double hi);

enum class Component { phi, psi };

enum class FamilyKind { airy, bessel, sine, conditioned };

/// Tag of an unconditioned kernel family. `nu` is only read for Bessel.
struct FamilyTag {
  FamilyKind kind = FamilyKind::airy;
  double nu = 0.0;

  static FamilyTag airy() { return {FamilyKind::airy, 0.0}; }
  static FamilyTag bessel(double nu) { return {FamilyKind::bessel, nu}; }
  static FamilyTag sine() { return {FamilyKind::sine, 0.0}; }
};

/// Value of the family's component function (phi or psi) at t0 + delta.
///
/// Uses a Taylor series about the real point t0 whose derivatives are
/// generated from the family's first-order system, so it only serves
/// arguments within |delta| <= 1e-6 of the real axis point t0.
cplx taylor_extend(FamilyTag family, Component which, double t0, cplx delta);

}  // namespace janossy

namespace janossy {

/// Connection data (m, A, B, C) with real coefficients in ascending degree,
/// defining m(x) d/dx (phi, psi) = [[A, B], [-C, -A]] (phi, psi).
struct RealConnection {
  std::vector<double> m, A, B, C;
};

RealConnection family_connection(FamilyTag family);

/// Real-axis values (phi(x), psi(x)) of an unconditioned family.
void family_components(FamilyTag family, double x, double& phi, double& psi);

/// Scaled Taylor coefficients phi^(n)(x)/n!, psi^(n)(x)/n! for n = 0..order,
/// generated by differentiating m Phi' = M Phi with Leibniz' rule. Requires
/// m(x) != 0. Coefficient lists are ascending-degree.
void taylor_coefficients(const std::vector<cplx>& m, const std::vector<cplx>& A,
                         const std::vector<cplx>& B, const std::vector<cplx>& C,
                         cplx x, cplx phi, cplx psi, int order,
                         std::vector<cplx>& phi_coeffs,
                         std::vector<cplx>& psi_coeffs);

}  // namespace janossy
