#pragma once

#include <functional>
#include <string>
#include <vector>

#include "janossy/fredholm.hpp"
#include "janossy/kernel.hpp"
#include "janossy/twode.hpp"

namespace janossy {

enum class Route { tw, nystrom };

std::string route_name(Route route);

struct DistributionOptions {
  int order = kDefaultOrder;
  double airy_cutoff = 10.0;                // Lambda
  double bessel_cutoff = kHardEdgeCutoff;   // left end of Nystrom intervals
  double tw_bessel_cutoff = 1e-10;          // mu, where the Bessel system starts
  double epsilon = 1e-10;                   // imaginary part of conditioning loci
  double step = 1e-4;                       // differencing step in s
  int threads = 0;                          // grid workers, 0 for the default
};

/// Values on a grid plus the parameters that produced them.
struct DistributionGrid {
  std::string quantity;
  FamilyTag family;
  Route route = Route::nystrom;
  DistributionOptions options;
  std::vector<double> s;
  std::vector<double> values;
};

/// Nystrom interval realizing the family's natural interval at s: (s, Lambda)
/// for Airy, (cutoff, s) for Bessel.
std::pair<double, double> gap_interval(FamilyTag family, double s,
                                       const DistributionOptions& options);

/// E_0 of the unconditioned kernel. Only the Nystrom route exists here.
double gap_probability(FamilyTag family, double s, Route route,
                       const DistributionOptions& options = {});
/// E_0..E_pmax of the unconditioned kernel.
std::vector<double> counting_probabilities(FamilyTag family, double s, int pmax,
                                           const DistributionOptions& options = {});

/// Density of the k-th largest (Airy) or k-th smallest (Bessel) point.
double p_k(FamilyTag family, int k, double s, const DistributionOptions& options = {});
DistributionGrid p_k_grid(FamilyTag family, int k, const std::vector<double>& s,
                          const DistributionOptions& options = {});

/// rho1(t) Det(1 - K~ on the interval): a point at t, none elsewhere.
double janossy_j1(FamilyTag family, double t, double s, Route route,
                  const DistributionOptions& options = {});
/// rho1(t) E_p of the conditioned kernel (Nystrom only).
double janossy_j1p(FamilyTag family, double t, double s, int p,
                   const DistributionOptions& options = {});

/// Joint density of the two extreme points, first at t and second at s.
double joint_p12(FamilyTag family, double t, double s, Route route,
                 const DistributionOptions& options = {});
/// Row of P12(t, s) over many s sharing one locus t.
std::vector<double> joint_p12_row(FamilyTag family, double t, const std::vector<double>& s,
                                  Route route, const DistributionOptions& options = {});

/// Conditioned gap Det(1 - K~) as a function of the moving endpoint, from
/// the TW system. Returns one value per s; s beyond the locus is allowed.
std::vector<double> conditioned_gap_row(FamilyTag family, double t,
                                        const std::vector<double>& s,
                                        const DistributionOptions& options = {});

/// Probability that (first, second) falls in [t_lo, t_hi] x [s_lo, s_hi].
/// The s-integral is exact through the conditioned gap; t uses Gauss-Legendre.
double joint_cell_mass(FamilyTag family, double t_lo, double t_hi, double s_lo, double s_hi,
                       const DistributionOptions& options = {}, int t_order = 12);
/// Probabilities of all cells of a tensor grid, row-major with t outer.
std::vector<double> joint_cell_masses(FamilyTag family, const std::vector<double>& t_edges,
                                      const std::vector<double>& s_edges,
                                      const DistributionOptions& options = {},
                                      int t_order = 12);

/// 4 t s P(t^2, s^2): the density in singular-value variables.
double to_singular_values(double t, double s, const std::function<double(double, double)>& p);

}  // namespace janossy
