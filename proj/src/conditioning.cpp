#include "janossy/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "janossy/error.hpp"

namespace janossy {

namespace {

constexpr double kNearRadius = 1e-3;
constexpr int kNearOrder = 24;
constexpr double kLocusSeparation = 1e-8;

std::vector<cplx> reexpand(const std::vector<cplx>& c, cplx d, int order) {
  const int n = static_cast<int>(c.size());
  std::vector<cplx> work = c;
  for (int k = 0; k < n; ++k) {
    for (int j = n - 2; j >= k; --j) work[j] += d * work[j + 1];
  }
  work.resize(order + 1);
  return work;
}

// phi~ = phi - b g/(x-t), psi~ = psi - a g/(x-t), g = a phi - b psi.
class ConditionedModel final : public KernelModel {
 public:
  ConditionedModel(std::shared_ptr<const KernelModel> base, LocusData locus)
      : base_(std::move(base)), locus_(locus) {
    near_ = std::min(kNearRadius, 0.25 * base_->analytic_radius(locus.t));
  }

  void taylor(cplx x0, int order, std::vector<cplx>& phi,
              std::vector<cplx>& psi) const override {
    const cplx a = locus_.a, b = locus_.b;
    const cplx d = x0 - locus_.t;
    if (std::abs(d) >= near_) {
      base_->taylor(x0, order, phi, psi);
      // series of 1/(x - t) about x0
      std::vector<cplx> inv(order + 1);
      inv[0] = 1.0 / d;
      for (int n = 1; n <= order; ++n) inv[n] = -inv[n - 1] / d;
      for (int n = order; n >= 0; --n) {
        cplx h = 0.0;
        for (int j = 0; j <= n; ++j) h += (a * phi[j] - b * psi[j]) * inv[n - j];
        phi[n] -= b * h;
        psi[n] -= a * h;
      }
      return;
    }
    // g vanishes at t, so g/(x-t) is a power series about t
    const int total = order + kNearOrder;
    std::vector<cplx> f, g;
    base_->taylor(locus_.t, total + 1, f, g);
    std::vector<cplx> pt(total + 1), qt(total + 1);
    for (int n = 0; n <= total; ++n) {
      const cplx h = a * f[n + 1] - b * g[n + 1];
      pt[n] = f[n] - b * h;
      qt[n] = g[n] - a * h;
    }
    phi = reexpand(pt, d, order);
    psi = reexpand(qt, d, order);
  }

  double analytic_radius(cplx x) const override {
    return std::min(base_->analytic_radius(x), std::abs(x - locus_.t));
  }

 private:
  std::shared_ptr<const KernelModel> base_;
  LocusData locus_;
  double near_;
};

}  // namespace

ConnectionPolynomials transformed_connection(const ConnectionPolynomials& base, cplx a,
                                             cplx b, cplx t) {
  const Polynomial& m = base.m;
  const Polynomial& A = base.A;
  const Polynomial& B = base.B;
  const Polynomial& C = base.C;
  const Polynomial x_t = Polynomial::linear_factor(t);
  const Polynomial x_t2 = x_t * x_t;
  const Polynomial D = 2.0 * a * b * A + a * a * B + b * b * C - m;
  ConnectionPolynomials out;
  out.m = x_t2 * m;
  out.A = x_t2 * A + x_t * (a * a * B - b * b * C) - a * b * D;
  out.B = x_t2 * B - 2.0 * b * (x_t * (b * A + a * B)) + b * b * D;
  out.C = x_t2 * C + 2.0 * a * (x_t * (a * A + b * C)) + a * a * D;
  return out;
}

KernelSpec condition(const KernelSpec& kernel, cplx t) {
  if (std::abs(t.imag()) > 1e-6) {
    throw DomainError("condition: |Im t| must not exceed 1e-6");
  }
  const double t0 = t.real();
  if (!std::isfinite(t0) || !kernel.in_window(t0)) {
    throw DomainError("condition: locus outside the kernel's validity window: " +
                      std::to_string(t0));
  }
  for (const auto& l : kernel.loci()) {
    if (std::abs(l.t.real() - t0) < kLocusSeparation) {
      throw DomainError("condition: coincident loci");
    }
  }
  const double density = rho1(kernel, t0);
  if (!(density >= 1e-12)) {
    throw DomainError("condition: density at the locus is below 1e-12");
  }
  const ComponentJet j = kernel.jet(t);
  const cplx root = std::sqrt(diagonal_value(j));
  const LocusData locus{t, j.psi / root, j.phi / root};

  auto loci = kernel.loci();
  loci.push_back(locus);
  return KernelSpec(kernel.root(),
                    transformed_connection(kernel.connection(), locus.a, locus.b, t),
                    kernel.valid_lo(), kernel.valid_hi(), std::move(loci),
                    std::make_shared<ConditionedModel>(kernel.model_ptr(), locus));
}

KernelSpec condition_many(const KernelSpec& kernel, const std::vector<cplx>& loci) {
  for (std::size_t i = 0; i < loci.size(); ++i) {
    for (std::size_t j = i + 1; j < loci.size(); ++j) {
      if (std::abs(loci[i].real() - loci[j].real()) < kLocusSeparation) {
        throw DomainError("condition_many: coincident loci");
      }
    }
  }
  KernelSpec out = kernel;
  for (const cplx& t : loci) out = condition(out, t);
  return out;
}

Matrix2c gauge_matrix(const LocusData& locus, double x) {
  const cplx d = cplx(x) - locus.t;
  if (d == cplx{}) throw SingularityError("gauge_matrix: pole at the locus");
  const cplx a = locus.a, b = locus.b;
  return {{{1.0 - a * b / d, b * b / d}, {-a * a / d, 1.0 + a * b / d}}};
}

std::pair<cplx, cplx> sine_k1_check(double x, double y) {
  static const KernelSpec conditioned = condition(make_kernel(FamilyTag::sine()), 0.0);
  const cplx value = cd_eval(conditioned, x, y);
  const double sinc_xy = (x == y) ? 1.0 : std::sin(x - y) / (x - y);
  const double closed = (sinc_xy - std::sin(x) * std::sin(y) / (x * y)) / std::numbers::pi;
  return {value, closed};
}

}  // namespace janossy
