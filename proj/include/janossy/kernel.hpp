#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "janossy/polynomial.hpp"
#include "janossy/specfun.hpp"

namespace janossy {

/// Coefficient functions of m(x) Phi' = [[A, B], [-C, -A]] Phi.
struct ConnectionPolynomials {
  Polynomial m, A, B, C;
};

/// A conditioning locus t with its normalization constants.
struct LocusData {
  cplx t;
  cplx a;  // psi(t) / sqrt(rho1(t))
  cplx b;  // phi(t) / sqrt(rho1(t))
};

/// Values and first derivatives of the component pair at one point.
struct ComponentJet {
  cplx phi, psi, dphi, dpsi;
};

/// Evaluates the component pair as a local power series.
class KernelModel {
 public:
  virtual ~KernelModel() = default;
  /// Scaled Taylor coefficients phi^(n)(x0)/n!, psi^(n)(x0)/n!, n = 0..order.
  virtual void taylor(cplx x0, int order, std::vector<cplx>& phi,
                      std::vector<cplx>& psi) const = 0;
  /// Distance from x to the nearest singularity of the pair.
  virtual double analytic_radius(cplx x) const = 0;
};

class KernelSpec {
 public:
  KernelSpec(FamilyTag root, ConnectionPolynomials connection, double lo, double hi,
             std::vector<LocusData> loci, std::shared_ptr<const KernelModel> model);

  FamilyTag root() const { return root_; }
  FamilyKind kind() const { return loci_.empty() ? root_.kind : FamilyKind::conditioned; }
  bool conditioned() const { return !loci_.empty(); }
  const std::vector<LocusData>& loci() const { return loci_; }
  const ConnectionPolynomials& connection() const { return connection_; }
  const KernelModel& model() const { return *model_; }
  std::shared_ptr<const KernelModel> model_ptr() const { return model_; }
  double valid_lo() const { return lo_; }
  double valid_hi() const { return hi_; }
  bool in_window(double x) const;

  cplx phi(cplx x) const;
  cplx psi(cplx x) const;
  ComponentJet jet(cplx x) const;

 private:
  FamilyTag root_;
  ConnectionPolynomials connection_;
  double lo_, hi_;
  std::vector<LocusData> loci_;
  std::shared_ptr<const KernelModel> model_;
};

KernelSpec make_kernel(FamilyTag family);

/// Below this separation the kernel is evaluated through its diagonal limit.
inline constexpr double kDiagonalGuard = 1e-5;

cplx cd_eval(const KernelSpec& kernel, double x, double y);
/// Same as cd_eval with the component jets at x and y supplied by the caller.
cplx cd_eval(const KernelSpec& kernel, double x, const ComponentJet& jx, double y,
             const ComponentJet& jy);
/// K(x, x) = phi'(x) psi(x) - phi(x) psi'(x).
cplx diagonal_value(const ComponentJet& j);

double rho1(const KernelSpec& kernel, double t);
double rho2(const KernelSpec& kernel, double t, double s);

/// phi' = (A phi + B psi)/m or psi' = (-C phi - A psi)/m at x.
cplx connection_derivative(const KernelSpec& kernel, Component which, double x);

}  // namespace janossy
