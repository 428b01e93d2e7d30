#include "janossy/kernel.hpp"

#include <cmath>
#include <string>

#include "janossy/error.hpp"

namespace janossy {

namespace {

std::vector<cplx> to_complex(const std::vector<double>& v) { return {v.begin(), v.end()}; }

// Component pair of an unconditioned family. Complex arguments are reached by
// a Taylor shift from the real point Re x.
class BaseModel final : public KernelModel {
 public:
  explicit BaseModel(FamilyTag tag) : tag_(tag) {
    const auto c = family_connection(tag);
    m_ = to_complex(c.m);
    A_ = to_complex(c.A);
    B_ = to_complex(c.B);
    C_ = to_complex(c.C);
  }

  void taylor(cplx x0, int order, std::vector<cplx>& phi,
              std::vector<cplx>& psi) const override {
    const double re = x0.real();
    const double im = x0.imag();
    if (std::abs(im) > 1e-6) {
      throw DomainError("kernel: complex argument too far from the real axis");
    }
    double f = 0.0, g = 0.0;
    family_components(tag_, re, f, g);
    if (im == 0.0) {
      if (order == 0) {
        phi.assign(1, f);
        psi.assign(1, g);
        return;
      }
      taylor_coefficients(m_, A_, B_, C_, re, f, g, order, phi, psi);
      return;
    }
    const int extra = 8;
    std::vector<cplx> pr, qr;
    taylor_coefficients(m_, A_, B_, C_, re, f, g, order + extra, pr, qr);
    phi = shift(pr, cplx(0.0, im), order);
    psi = shift(qr, cplx(0.0, im), order);
  }

  double analytic_radius(cplx x) const override {
    if (tag_.kind == FamilyKind::bessel) return std::abs(x);
    return std::numeric_limits<double>::infinity();
  }

  // Re-expands sum c_n h^n about h = d, keeping orders 0..order.
  static std::vector<cplx> shift(const std::vector<cplx>& c, cplx d, int order) {
    const int n = static_cast<int>(c.size());
    std::vector<cplx> work = c;
    for (int k = 0; k < n; ++k) {
      for (int j = n - 2; j >= k; --j) work[j] += d * work[j + 1];
    }
    work.resize(order + 1);
    return work;
  }

 private:
  FamilyTag tag_;
  std::vector<cplx> m_, A_, B_, C_;
};

std::pair<double, double> family_window(FamilyTag tag) {
  switch (tag.kind) {
    case FamilyKind::airy:
      return {-40.0, 200.0};
    case FamilyKind::bessel:
      return {0.0, 1e4};
    case FamilyKind::sine:
      return {-std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
    case FamilyKind::conditioned:
      break;
  }
  throw DomainError("make_kernel: invalid family tag");
}

}  // namespace

KernelSpec::KernelSpec(FamilyTag root, ConnectionPolynomials connection, double lo,
                       double hi, std::vector<LocusData> loci,
                       std::shared_ptr<const KernelModel> model)
    : root_(root),
      connection_(std::move(connection)),
      lo_(lo),
      hi_(hi),
      loci_(std::move(loci)),
      model_(std::move(model)) {}

bool KernelSpec::in_window(double x) const {
  if (root_.kind == FamilyKind::bessel) return x > lo_ && x <= hi_;
  return x >= lo_ && x <= hi_;
}

cplx KernelSpec::phi(cplx x) const {
  std::vector<cplx> f, g;
  model_->taylor(x, 0, f, g);
  return f[0];
}

cplx KernelSpec::psi(cplx x) const {
  std::vector<cplx> f, g;
  model_->taylor(x, 0, f, g);
  return g[0];
}

ComponentJet KernelSpec::jet(cplx x) const {
  std::vector<cplx> f, g;
  model_->taylor(x, 1, f, g);
  return {f[0], g[0], f[1], g[1]};
}

KernelSpec make_kernel(FamilyTag family) {
  if (family.kind == FamilyKind::bessel && !(family.nu > -1.0)) {
    throw DomainError("make_kernel: Bessel order must exceed -1, got " +
                      std::to_string(family.nu));
  }
  const auto c = family_connection(family);
  ConnectionPolynomials conn{Polynomial(to_complex(c.m)), Polynomial(to_complex(c.A)),
                             Polynomial(to_complex(c.B)), Polynomial(to_complex(c.C))};
  const auto [lo, hi] = family_window(family);
  return KernelSpec(family, std::move(conn), lo, hi, {},
                    std::make_shared<BaseModel>(family));
}

cplx diagonal_value(const ComponentJet& j) { return j.dphi * j.psi - j.phi * j.dpsi; }

cplx cd_eval(const KernelSpec& kernel, double x, const ComponentJet& jx, double y,
             const ComponentJet& jy) {
  if (std::abs(x - y) > kDiagonalGuard) {
    return (jx.phi * jy.psi - jx.psi * jy.phi) / (x - y);
  }
  if (x == y) return diagonal_value(jx);
  // symmetric in (x, y) and second-order accurate in x - y
  return diagonal_value(kernel.jet(0.5 * (x + y)));
}

cplx cd_eval(const KernelSpec& kernel, double x, double y) {
  if (std::abs(x - y) > kDiagonalGuard) {
    std::vector<cplx> fx, gx, fy, gy;
    kernel.model().taylor(x, 0, fx, gx);
    kernel.model().taylor(y, 0, fy, gy);
    return (fx[0] * gy[0] - gx[0] * fy[0]) / (x - y);
  }
  return diagonal_value(kernel.jet(0.5 * (x + y)));
}

double rho1(const KernelSpec& kernel, double t) {
  return diagonal_value(kernel.jet(t)).real();
}

double rho2(const KernelSpec& kernel, double t, double s) {
  if (t == s) return 0.0;
  const cplx k = cd_eval(kernel, t, s);
  return rho1(kernel, t) * rho1(kernel, s) - (k * k).real();
}

cplx connection_derivative(const KernelSpec& kernel, Component which, double x) {
  const auto& c = kernel.connection();
  const cplx m = c.m(x);
  if (std::abs(m) < 1e-13) {
    throw SingularityError("connection_derivative: m(x) vanishes at x = " +
                           std::to_string(x));
  }
  const cplx f = kernel.phi(x), g = kernel.psi(x);
  if (which == Component::phi) return (c.A(x) * f + c.B(x) * g) / m;
  return (-c.C(x) * f - c.A(x) * g) / m;
}

}  // namespace janossy
