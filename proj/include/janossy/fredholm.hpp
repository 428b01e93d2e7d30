#pragma once

#include <vector>

#include <Eigen/Dense>

#include "janossy/kernel.hpp"
#include "janossy/specfun.hpp"

namespace janossy {

inline constexpr int kDefaultOrder = 200;
/// Left endpoint standing in for 0 on hard-edge intervals.
inline constexpr double kHardEdgeCutoff = 1e-12;

struct NystromSpectrum {
  double lo = 0.0;
  double hi = 0.0;
  int order = 0;
  std::vector<double> eigenvalues;  // descending
  QuadratureRule rule;
};

/// Real symmetric matrix sqrt(w_a) Re K(x_a, x_b) sqrt(w_b).
Eigen::MatrixXd nystrom_matrix(const KernelSpec& kernel, const QuadratureRule& rule);

NystromSpectrum nystrom_spectrum(const KernelSpec& kernel, double lo, double hi,
                                 int order = kDefaultOrder);

/// prod (1 - z lambda_i)
double fredholm_det(const NystromSpectrum& spectrum, double z = 1.0);
/// sum log1p(-z lambda_i); keeps relative accuracy when the determinant is near 1.
double log_fredholm_det(const NystromSpectrum& spectrum, double z = 1.0);

/// Probability of exactly p points in the interval.
double counting_prob(const NystromSpectrum& spectrum, int p);
/// E_0..E_pmax in one pass.
std::vector<double> counting_probs(const NystromSpectrum& spectrum, int pmax);

/// Resolvent kernel of K restricted to (lo, hi), evaluated at (x, y) through
/// Nystrom interpolation.
double resolvent_value(const KernelSpec& kernel, double lo, double hi, int order, double x,
                       double y);

/// Eigenvalues of a real symmetric matrix, descending.
std::vector<double> sym_eigen(const Eigen::MatrixXd& matrix);

}  // namespace janossy
