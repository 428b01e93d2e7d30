#include "janossy/fredholm.hpp"

#include <algorithm>
#include <cmath>

#include "janossy/error.hpp"

namespace janossy {

namespace {

std::vector<ComponentJet> node_jets(const KernelSpec& kernel,
                                    const std::vector<double>& nodes) {
  std::vector<ComponentJet> jets;
  jets.reserve(nodes.size());
  for (double x : nodes) jets.push_back(kernel.jet(x));
  return jets;
}

double clamp_eigenvalue(double lambda) { return std::min(lambda, 1.0 - 1e-13); }

}  // namespace

Eigen::MatrixXd nystrom_matrix(const KernelSpec& kernel, const QuadratureRule& rule) {
  const int n = static_cast<int>(rule.nodes.size());
  const auto jets = node_jets(kernel, rule.nodes);
  Eigen::MatrixXd k(n, n);
  for (int a = 0; a < n; ++a) {
    const double sa = std::sqrt(rule.weights[a]);
    k(a, a) = diagonal_value(jets[a]).real() * rule.weights[a];
    for (int b = a + 1; b < n; ++b) {
      const double v = cd_eval(kernel, rule.nodes[a], jets[a], rule.nodes[b], jets[b]).real();
      k(a, b) = k(b, a) = v * sa * std::sqrt(rule.weights[b]);
    }
  }
  return k;
}

std::vector<double> sym_eigen(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw DomainError("sym_eigen: matrix not square");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale) {
    throw DomainError("sym_eigen: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("sym_eigen: iteration cap exceeded");
  }
  std::vector<double> ev(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

NystromSpectrum nystrom_spectrum(const KernelSpec& kernel, double lo, double hi, int order) {
  if (order < 8) throw DomainError("nystrom_spectrum: order must be >= 8");
  NystromSpectrum s;
  s.lo = lo;
  s.hi = hi;
  s.order = order;
  s.rule = gauss_legendre(order, lo, hi);
  s.eigenvalues = sym_eigen(nystrom_matrix(kernel, s.rule));
  return s;
}

double fredholm_det(const NystromSpectrum& spectrum, double z) {
  double d = 1.0;
  for (double l : spectrum.eigenvalues) d *= 1.0 - z * l;
  return d;
}

double log_fredholm_det(const NystromSpectrum& spectrum, double z) {
  double acc = 0.0;
  for (double l : spectrum.eigenvalues) acc += std::log1p(-z * l);
  return acc;
}

std::vector<double> counting_probs(const NystromSpectrum& spectrum, int pmax) {
  if (pmax < 0) throw DomainError("counting_probs: p must be >= 0");
  // Poisson-binomial recursion: each mode is occupied with probability lambda.
  std::vector<double> c(pmax + 1, 0.0);
  c[0] = 1.0;
  for (double raw : spectrum.eigenvalues) {
    const double l = clamp_eigenvalue(raw);
    for (int p = pmax; p >= 1; --p) c[p] = (1.0 - l) * c[p] + l * c[p - 1];
    c[0] *= 1.0 - l;
  }
  return c;
}

double counting_prob(const NystromSpectrum& spectrum, int p) {
  if (p > static_cast<int>(spectrum.eigenvalues.size())) return 0.0;
  return counting_probs(spectrum, p)[p];
}

double resolvent_value(const KernelSpec& kernel, double lo, double hi, int order, double x,
                       double y) {
  if (x < lo || x > hi || y < lo || y > hi) {
    throw DomainError("resolvent_value: point outside the interval");
  }
  const auto rule = gauss_legendre(order, lo, hi);
  const Eigen::MatrixXd k = nystrom_matrix(kernel, rule);
  const int n = order;
  const auto jx = kernel.jet(x), jy = kernel.jet(y);
  Eigen::VectorXd kx(n), ky(n);
  for (int b = 0; b < n; ++b) {
    const double xb = rule.nodes[b];
    const auto jb = kernel.jet(xb);
    const double sw = std::sqrt(rule.weights[b]);
    kx(b) = sw * cd_eval(kernel, x, jx, xb, jb).real();
    ky(b) = sw * cd_eval(kernel, xb, jb, y, jy).real();
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system);
  if (eig.info() != Eigen::Success) throw ConvergenceError("resolvent_value: eigensolve failed");
  if (eig.eigenvalues().cwiseAbs().minCoeff() < 1e-12) {
    throw SingularityError("resolvent_value: 1 is an eigenvalue of the kernel");
  }
  const Eigen::VectorXd r = system.ldlt().solve(ky);
  return cd_eval(kernel, x, jx, y, jy).real() + kx.dot(r);
}

}  // namespace janossy
