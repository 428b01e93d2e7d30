#pragma once

#include <array>
#include <utility>
#include <vector>

#include "janossy/kernel.hpp"

namespace janossy {

/// Default imaginary offset given to a conditioning locus.
inline constexpr double kDefaultEpsilon = 1e-10;

/// Connection of the conditioned pair, already multiplied through by (x-t)^2.
ConnectionPolynomials transformed_connection(const ConnectionPolynomials& base, cplx a,
                                             cplx b, cplx t);

/// Condition `kernel` on a particle at t (Re t is the locus, Im t a small
/// regularization, |Im t| <= 1e-6).
KernelSpec condition(const KernelSpec& kernel, cplx t);

/// Conditions successively on every locus. Real parts must differ by >= 1e-8.
KernelSpec condition_many(const KernelSpec& kernel, const std::vector<cplx>& loci);

using Matrix2c = std::array<std::array<cplx, 2>, 2>;

/// Unimodular map taking (phi, psi) to the conditioned pair at x.
Matrix2c gauge_matrix(const LocusData& locus, double x);

/// Conditioned sine kernel at locus 0, evaluated at (x, y), paired with the
/// closed form (sin(x-y)/(x-y) - sin(x) sin(y)/(x y)) / pi.
std::pair<cplx, cplx> sine_k1_check(double x, double y);

}  // namespace janossy
