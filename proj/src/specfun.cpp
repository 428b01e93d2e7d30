#include "janossy/specfun.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "janossy/error.hpp"

namespace janossy {

namespace {

constexpr double kAiryWindow = 200.0;
constexpr double kBesselMaxArg = 1e4;

void check_airy_arg(double x) {
  if (!std::isfinite(x) || std::abs(x) > kAiryWindow) {
    throw DomainError("airy: argument outside [-200, 200]: " + std::to_string(x));
  }
}

void check_bessel_args(double nu, double x) {
  if (!(nu > -1.0)) throw DomainError("bessel: order must exceed -1");
  if (!(x >= 0.0) || x > kBesselMaxArg) {
    throw DomainError("bessel: argument outside [0, 1e4]: " + std::to_string(x));
  }
}

// Taylor coefficients of polynomial p about x: p^(j)(x)/j!.
std::vector<cplx> shifted_coefficients(const std::vector<cplx>& p, cplx x) {
  std::vector<cplx> c = p;
  const int n = static_cast<int>(c.size());
  // repeated synthetic division
  for (int k = 0; k < n; ++k) {
    for (int j = n - 2; j >= k; --j) c[j] += x * c[j + 1];
  }
  return c;
}

cplx at(const std::vector<cplx>& c, int j) {
  return j < static_cast<int>(c.size()) ? c[j] : cplx{};
}

std::vector<cplx> to_complex(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

double airy_ai(double x) {
  check_airy_arg(x);
  return boost::math::airy_ai(x);
}

double airy_ai_prime(double x) {
  check_airy_arg(x);
  return boost::math::airy_ai_prime(x);
}

double bessel_j(double nu, double x) {
  check_bessel_args(nu, x);
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return boost::math::cyl_bessel_j(nu, x);
}

double bessel_j_prime(double nu, double x) {
  check_bessel_args(nu, x);
  if (x == 0.0) {
    if (nu == 0.0 || nu > 1.0) return 0.0;
    if (nu == 1.0) return 0.5;
    return std::copysign(std::numeric_limits<double>::infinity(), nu);
  }
  return 0.5 * (boost::math::cyl_bessel_j(nu - 1.0, x) -
                boost::math::cyl_bessel_j(nu + 1.0, x));
}

QuadratureRule gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DomainError("gauss_legendre: need finite lo < hi");
  }
  const int n = order;
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double step = p1 / dp;
      // damping keeps the iterate inside (-1, 1)
      while (std::abs(z - step) >= 1.0) step *= 0.5;
      z -= step;
      if (std::abs(step) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) throw ConvergenceError("gauss_legendre: Newton did not converge");
    // final derivative at the converged root
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  QuadratureRule rule;
  rule.order = n;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + rad * x[i];
    rule.weights[i] = rad * w[i];
  }
  return rule;
}

RealConnection family_connection(FamilyTag family) {
  switch (family.kind) {
    case FamilyKind::airy:
      return {{1.0}, {0.0}, {1.0}, {0.0, -1.0}};
    case FamilyKind::bessel:
      return {{0.0, 1.0}, {0.0}, {1.0}, {-0.25 * family.nu * family.nu, 0.25}};
    case FamilyKind::sine:
      return {{1.0}, {0.0}, {1.0}, {1.0}};
    case FamilyKind::conditioned:
      break;
  }
  throw DomainError("family_connection: conditioned kernels carry their own connection");
}

void family_components(FamilyTag family, double x, double& phi, double& psi) {
  switch (family.kind) {
    case FamilyKind::airy:
      phi = airy_ai(x);
      psi = airy_ai_prime(x);
      return;
    case FamilyKind::bessel: {
      if (x < 0.0) throw DomainError("bessel kernel: argument must be >= 0");
      const double r = std::sqrt(x);
      phi = bessel_j(family.nu, r);
      psi = 0.5 * r * bessel_j_prime(family.nu, r);
      if (x == 0.0 && family.nu >= 0.0) psi = 0.0;
      return;
    }
    case FamilyKind::sine: {
      const double s = 1.0 / std::sqrt(std::numbers::pi);
      phi = s * std::sin(x);
      psi = s * std::cos(x);
      return;
    }
    case FamilyKind::conditioned:
      break;
  }
  throw DomainError("family_components: not an unconditioned family");
}

void taylor_coefficients(const std::vector<cplx>& m, const std::vector<cplx>& A,
                         const std::vector<cplx>& B, const std::vector<cplx>& C,
                         cplx x, cplx phi, cplx psi, int order,
                         std::vector<cplx>& phi_coeffs,
                         std::vector<cplx>& psi_coeffs) {
  const auto ms = shifted_coefficients(m, x);
  const auto as = shifted_coefficients(A, x);
  const auto bs = shifted_coefficients(B, x);
  const auto cs = shifted_coefficients(C, x);
  const cplx m0 = at(ms, 0);
  if (std::abs(m0) < 1e-300) throw SingularityError("taylor_coefficients: m(x) = 0");
  phi_coeffs.assign(order + 1, cplx{});
  psi_coeffs.assign(order + 1, cplx{});
  phi_coeffs[0] = phi;
  psi_coeffs[0] = psi;
  // With f = sum f_n h^n and polynomial Taylor data p_j, matching the h^n
  // coefficient of m f' = A f + B g gives
  //   sum_j m_j (n+1-j) f_{n+1-j} = sum_j (A_j f_{n-j} + B_j g_{n-j}).
  for (int n = 0; n < order; ++n) {
    cplx rf = 0.0, rg = 0.0;
    for (int j = 0; j <= n; ++j) {
      rf += at(as, j) * phi_coeffs[n - j] + at(bs, j) * psi_coeffs[n - j];
      rg += -at(cs, j) * phi_coeffs[n - j] - at(as, j) * psi_coeffs[n - j];
    }
    for (int j = 1; j <= n; ++j) {
      const double k = static_cast<double>(n + 1 - j);
      rf -= at(ms, j) * k * phi_coeffs[n + 1 - j];
      rg -= at(ms, j) * k * psi_coeffs[n + 1 - j];
    }
    phi_coeffs[n + 1] = rf / (m0 * static_cast<double>(n + 1));
    psi_coeffs[n + 1] = rg / (m0 * static_cast<double>(n + 1));
  }
}

cplx taylor_extend(FamilyTag family, Component which, double t0, cplx delta) {
  if (std::abs(delta) > 1e-6) {
    throw DomainError("taylor_extend: |delta| exceeds 1e-6");
  }
  double phi = 0.0, psi = 0.0;
  family_components(family, t0, phi, psi);
  if (delta == cplx{}) return which == Component::phi ? phi : psi;
  const auto conn = family_connection(family);
  std::vector<cplx> fc, gc;
  constexpr int kMaxOrder = 8;
  taylor_coefficients(to_complex(conn.m), to_complex(conn.A), to_complex(conn.B),
                      to_complex(conn.C), t0, phi, psi, kMaxOrder, fc, gc);
  const auto& c = which == Component::phi ? fc : gc;
  // drop trailing terms below 1e-30 relative to the leading one
  int last = kMaxOrder;
  const double scale = std::max(std::abs(c[0]), std::abs(c[1]) * std::abs(delta));
  double dpow = std::pow(std::abs(delta), kMaxOrder);
  while (last > 1 && std::abs(c[last]) * dpow < 1e-30 * scale) {
    dpow /= std::abs(delta);
    --last;
  }
  cplx r = 0.0;
  for (int n = last; n >= 0; --n) r = r * delta + c[n];
  return r;
}

}  // namespace janossy
