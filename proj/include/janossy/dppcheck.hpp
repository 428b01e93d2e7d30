#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace janossy {

/// Finite projection kernel on the ground set {0, ..., n-1}.
struct DiscreteDPP {
  Eigen::MatrixXd kernel;
  int rank = 0;
};

/// Validates symmetry, idempotence and integer trace (1e-10).
DiscreteDPP make_dpp(const Eigen::MatrixXd& kernel);

/// K = V V^T with V the orthonormal factor of a seeded Gaussian n x N matrix.
DiscreteDPP random_projection(int n, int rank, std::uint64_t seed);

using Subset = std::vector<int>;

/// Probability of every rank-sized configuration (principal minors of K).
std::map<Subset, double> enumerate_point_probs(const DiscreteDPP& dpp);

enum class JanossyRoute {
  resolvent,    // det(1 - K_I) det[R(l_i, l_j)]
  block,        // signed determinant of the bordered matrix
  transformed,  // det(kappa) det(1 - K~ on I minus the loci)
};

/// Particles at every locus and exactly p more in I \ loci.
double janossy_bruteforce(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                          int extra = 0);
double janossy_formula(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                       JanossyRoute route);
/// Extra-particle version from the spectrum of the transformed kernel.
double janossy_p_formula(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                         int extra);
/// Same quantity from Taylor coefficients at z = 1 of the z-dependent bordered
/// determinant, sampled on a circle.
double janossy_p_generating(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                            int extra);

/// K - k^T kappa^{-1} k on the whole ground set.
Eigen::MatrixXd transformed_kernel(const DiscreteDPP& dpp, const Subset& loci);

/// (rho_{p+k}(points, loci) / rho_k(loci), det[K~(points)])
std::pair<double, double> conditional_correlation_check(const DiscreteDPP& dpp,
                                                        const Subset& loci,
                                                        const Subset& points);

struct DppSuiteReport {
  int instances = 0;
  long checks = 0;
  double max_route_error = 0.0;        // resolvent, block, transformed vs enumeration
  double max_extra_error = 0.0;        // J_{k,p} routes vs enumeration
  double max_correlation_error = 0.0;  // conditional correlations
  double max_projection_error = 0.0;   // |K~^2 - K~| and |tr K~ - (N - k)|
  double route_tolerance = 1e-10;
  double projection_tolerance = 1e-9;
  bool passed() const {
    return max_route_error <= route_tolerance && max_extra_error <= route_tolerance &&
           max_correlation_error <= route_tolerance &&
           max_projection_error <= projection_tolerance;
  }
};

/// Runs every identity on `instances` seeded random projections (n <= 12).
DppSuiteReport run_identity_suite(int instances, std::uint64_t seed);

}  // namespace janossy
