#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "janossy/conditioning.hpp"
#include "janossy/error.hpp"
#include "janossy/fredholm.hpp"
#include "janossy/kernel.hpp"
#include "janossy/twode.hpp"

using namespace janossy;

namespace {

// Kernel whose pair vanishes identically.
KernelSpec zero_kernel() {
  class Zero : public KernelModel {
   public:
    void taylor(cplx, int order, std::vector<cplx>& phi, std::vector<cplx>& psi) const override {
      phi.assign(order + 1, 0.0);
      psi.assign(order + 1, 0.0);
    }
    double analytic_radius(cplx) const override { return 1e300; }
  };
  return KernelSpec(FamilyTag::sine(), {Polynomial{1.0}, Polynomial{}, Polynomial{1.0}, Polynomial{}},
                    -1e300, 1e300, {}, std::make_shared<Zero>());
}

}  // namespace

TEST_CASE("zero kernel") {
  const auto s = nystrom_spectrum(zero_kernel(), 0.0, 1.0, 16);
  for (double l : s.eigenvalues) CHECK(l == 0.0);
  CHECK(fredholm_det(s) == 1.0);
  CHECK(resolvent_value(zero_kernel(), 0.0, 1.0, 16, 0.3, 0.7) == 0.0);
}

TEST_CASE("airy gap at zero") {
  const KernelSpec airy = make_kernel(FamilyTag::airy());
  const auto s200 = nystrom_spectrum(airy, 0.0, 10.0, 200);
  const auto s400 = nystrom_spectrum(airy, 0.0, 10.0, 400);
  CHECK(std::abs(fredholm_det(s200) - 0.96937) < 1e-5);
  CHECK(std::abs(fredholm_det(s200) - fredholm_det(s400)) < 1e-8);
  CHECK(s200.eigenvalues.front() < 1.0);
  CHECK(s200.eigenvalues.back() > -1e-12);
  CHECK(fredholm_det(s200, 0.0) == 1.0);
  double previous = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double d = fredholm_det(s200, i / 20.0);
    CHECK(d <= previous);
    previous = d;
  }
  // similarity invariance of the trace
  double trace = 0.0, diagonal = 0.0;
  for (double l : s200.eigenvalues) trace += l;
  for (int a = 0; a < 200; ++a) {
    diagonal += rho1(airy, s200.rule.nodes[a]) * s200.rule.weights[a];
  }
  CHECK(std::abs(trace / diagonal - 1.0) < 1e-11);
}

TEST_CASE("self-convergence on the working intervals") {
  struct Case {
    FamilyTag tag;
    double lo, hi;
  };
  for (const Case& c : {Case{FamilyTag::airy(), -4.0, 10.0}, Case{FamilyTag::airy(), 2.0, 10.0},
                        Case{FamilyTag::bessel(0.0), kHardEdgeCutoff, 9.0},
                        Case{FamilyTag::bessel(1.0), kHardEdgeCutoff, 25.0},
                        Case{FamilyTag::sine(), 0.0, 6.0}}) {
    const KernelSpec k = make_kernel(c.tag);
    const double d200 = fredholm_det(nystrom_spectrum(k, c.lo, c.hi, 200));
    const double d400 = fredholm_det(nystrom_spectrum(k, c.lo, c.hi, 400));
    CAPTURE(c.lo);
    CAPTURE(c.hi);
    CHECK(std::abs(d200 - d400) < 1e-8);
  }
}

TEST_CASE("eigenvalue product equals the LU determinant") {
  const KernelSpec airy = make_kernel(FamilyTag::airy());
  const auto rule = gauss_legendre(200, -2.0, 10.0);
  const Eigen::MatrixXd m = nystrom_matrix(airy, rule);
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(200, 200) - m;
  const double lu = system.partialPivLu().determinant();
  const double product = fredholm_det(nystrom_spectrum(airy, -2.0, 10.0, 200));
  CHECK(std::abs(product / lu - 1.0) < 1e-11);
}

TEST_CASE("counting probabilities") {
  const KernelSpec airy = make_kernel(FamilyTag::airy());
  const auto s = nystrom_spectrum(airy, -2.0, 10.0, 200);
  const auto e = counting_probs(s, 200);
  CHECK(e[0] == doctest::Approx(fredholm_det(s)).epsilon(1e-14));
  double total = 0.0;
  for (double p : e) total += p;
  CHECK(std::abs(total - 1.0) < 1e-10);
  CHECK(counting_prob(s, 1) == doctest::Approx(e[1]).epsilon(1e-14));
  const double e1_400 = counting_prob(nystrom_spectrum(airy, -2.0, 10.0, 400), 1);
  CHECK(e[1] > 0.0);
  CHECK(e[1] < 1.0);
  CHECK(std::abs(e[1] - e1_400) < 1e-7);
  // brute-force elementary symmetric sum for a tiny spectrum
  NystromSpectrum tiny;
  tiny.eigenvalues = {0.9, 0.5, 0.2};
  const double e1 = 0.9 * 0.5 * 0.8 + 0.1 * 0.5 * 0.8 + 0.1 * 0.5 * 0.2;
  const double e2 = 0.9 * 0.5 * 0.8 + 0.9 * 0.5 * 0.2 + 0.1 * 0.5 * 0.2;
  CHECK(std::abs(counting_prob(tiny, 0) - 0.1 * 0.5 * 0.8) < 1e-16);
  CHECK(std::abs(counting_prob(tiny, 1) - e1) < 1e-15);
  CHECK(std::abs(counting_prob(tiny, 2) - e2) < 1e-15);
  CHECK(std::abs(counting_prob(tiny, 3) - 0.9 * 0.5 * 0.2) < 1e-16);
}

TEST_CASE("resolvent routes") {
  const KernelSpec airy = make_kernel(FamilyTag::airy());
  const double t = -1.0, lo = 0.0, hi = 10.0;
  // J1 = rho1(t) Det(1 - K~) = Det(1 - K) (rho1(t) + R(t, t)) for t outside I
  const double transformed =
      rho1(airy, t) * fredholm_det(nystrom_spectrum(condition(airy, cplx(t, 0.0)), lo, hi));
  // resolvent of the kernel on I, extended to t by the interpolation formula
  const double det = fredholm_det(nystrom_spectrum(airy, lo, hi));
  const auto rule = gauss_legendre(200, lo, hi);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(200, 200);
  Eigen::VectorXd kt(200);
  for (int a = 0; a < 200; ++a) {
    kt(a) = cd_eval(airy, rule.nodes[a], t).real();
    for (int b = 0; b < 200; ++b) {
      system(a, b) -= cd_eval(airy, rule.nodes[a], rule.nodes[b]).real() * rule.weights[b];
    }
  }
  const Eigen::VectorXd f = system.partialPivLu().solve(kt);
  double quadratic = 0.0;
  for (int a = 0; a < 200; ++a) quadratic += kt(a) * rule.weights[a] * f(a);
  const double resolvent_route = det * (rho1(airy, t) + quadratic);
  CHECK(std::abs(transformed / resolvent_route - 1.0) < 1e-7);

  // diagonal resolvent on (s, 10) against the TW system of the raw-edge limit:
  // -d/ds log Det(1 - K_(s,10)) = R(s, s)
  const double s = -1.0, h = 1e-4;
  auto log_det = [&](double x) { return log_fredholm_det(nystrom_spectrum(airy, x, hi)); };
  const double derivative = (log_det(s + h) - log_det(s - h)) / (2 * h);
  CHECK(std::abs(resolvent_value(airy, s, hi, 200, s, s) - derivative) < 1e-6);
  CHECK(std::abs(resolvent_value(airy, s, hi, 200, 0.3, 2.0) -
                 resolvent_value(airy, s, hi, 200, 2.0, 0.3)) < 1e-12);
}

TEST_CASE("resolvent on a conditioned kernel matches the TW system") {
  const KernelSpec ck = condition(make_kernel(FamilyTag::airy()), cplx(-2.0, 1e-10));
  const double s = -1.0;
  const TWSolution sol = solve(build_system(ck), {s});
  CHECK(std::abs(resolvent_value(ck, s, 10.0, 200, s, s) - sol.points[0].R) < 1e-6);
}

TEST_CASE("singular resolvent") {
  // the sine kernel on a long interval has eigenvalues within 1e-12 of 1
  const KernelSpec sine = make_kernel(FamilyTag::sine());
  CHECK_THROWS_AS(resolvent_value(sine, 0.0, 80.0, 200, 1.0, 2.0), SingularityError);
}

TEST_CASE("conditioned kernel imaginary parts are negligible") {
  const KernelSpec ck = condition(make_kernel(FamilyTag::airy()), cplx(-2.0, 1e-10));
  const auto rule = gauss_legendre(60, -4.0, 10.0);
  double worst = 0.0;
  for (int a = 0; a < 60; ++a) {
    for (int b = 0; b < 60; ++b) {
      const cplx k = cd_eval(ck, rule.nodes[a], rule.nodes[b]);
      if (std::abs(k) > 1e-12) worst = std::max(worst, std::abs(k.imag()) / std::abs(k));
    }
  }
  CHECK(worst < 1e-8);
  // complex determinant against the real-part determinant
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(60, 60);
  for (int a = 0; a < 60; ++a) {
    for (int b = 0; b < 60; ++b) {
      full(a, b) -= std::sqrt(rule.weights[a] * rule.weights[b]) *
                    cd_eval(ck, rule.nodes[a], rule.nodes[b]);
    }
  }
  const cplx complex_det = full.partialPivLu().determinant();
  const double real_det = fredholm_det(nystrom_spectrum(ck, -4.0, 10.0, 60));
  CHECK(std::abs(complex_det / real_det - 1.0) < 1e-7);
}

TEST_CASE("symmetric eigensolver") {
  const auto id = sym_eigen(Eigen::MatrixXd::Identity(5, 5));
  for (double l : id) CHECK(std::abs(l - 1.0) < 1e-15);
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const auto sw = sym_eigen(swap);
  CHECK(std::abs(sw[0] - 1.0) < 1e-15);
  CHECK(std::abs(sw[1] + 1.0) < 1e-15);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
  }
  const auto ev = sym_eigen(m);
  double sum = 0.0, product = 1.0;
  for (double l : ev) {
    sum += l;
    product *= l;
  }
  CHECK(std::abs(sum - m.trace()) < 1e-10);
  CHECK(std::abs(product - m.partialPivLu().determinant()) < 1e-10 * std::max(1.0, std::abs(product)));
  for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i] <= ev[i - 1]);
  Eigen::MatrixXd skew = m;
  skew(0, 1) += 1e-6;
  CHECK_THROWS_AS(sym_eigen(skew), DomainError);
}

TEST_CASE("preconditions") {
  const KernelSpec airy = make_kernel(FamilyTag::airy());
  CHECK_THROWS_AS(nystrom_spectrum(airy, 0.0, 10.0, 4), DomainError);
  CHECK_THROWS_AS(nystrom_spectrum(airy, 3.0, 1.0, 20), DomainError);
}
