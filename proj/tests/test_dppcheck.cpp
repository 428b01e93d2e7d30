#include <doctest.h>

#include <cmath>

#include "janossy/dppcheck.hpp"
#include "janossy/error.hpp"

using namespace janossy;

TEST_CASE("two-point example") {
  // rank-one projection onto (cos a, sin a)
  const double a = 0.4;
  Eigen::MatrixXd k(2, 2);
  k << std::cos(a) * std::cos(a), std::cos(a) * std::sin(a), std::cos(a) * std::sin(a),
      std::sin(a) * std::sin(a);
  const DiscreteDPP dpp = make_dpp(k);
  CHECK(dpp.rank == 1);
  const auto probs = enumerate_point_probs(dpp);
  CHECK(std::abs(probs.at({0}) - std::cos(a) * std::cos(a)) < 1e-15);
  CHECK(std::abs(probs.at({1}) - std::sin(a) * std::sin(a)) < 1e-15);
  // point at 0 and nothing at 1 is the event {0}
  CHECK(std::abs(janossy_bruteforce(dpp, {0}, {1}) - std::cos(a) * std::cos(a)) < 1e-15);
  CHECK(std::abs(janossy_bruteforce(dpp, {0}, {1}, 1)) < 1e-15);
}

TEST_CASE("identity kernel") {
  const DiscreteDPP dpp = make_dpp(Eigen::MatrixXd::Identity(4, 4));
  const auto probs = enumerate_point_probs(dpp);
  REQUIRE(probs.size() == 1);
  CHECK(probs.begin()->second == doctest::Approx(1.0));
  // every point is present, so any gap is impossible
  CHECK(janossy_bruteforce(dpp, {0}, {1, 2}) == 0.0);
  CHECK(janossy_bruteforce(dpp, {0}, {1, 2}, 2) == doctest::Approx(1.0));
}

TEST_CASE("projection validation") {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3) * 0.5;
  CHECK_THROWS_AS(make_dpp(k), DomainError);
  Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(3, 3);
  skew(0, 0) = 1.0;
  skew(0, 1) = 1e-3;
  CHECK_THROWS_AS(make_dpp(skew), DomainError);
  const DiscreteDPP p = random_projection(9, 4, 5);
  CHECK(p.rank == 4);
  CHECK((p.kernel * p.kernel - p.kernel).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.kernel - p.kernel.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(p.kernel.trace() - 4.0) < 1e-12);
  const DiscreteDPP same = random_projection(9, 4, 5);
  CHECK(same.kernel == p.kernel);
}

TEST_CASE("configuration probabilities sum to one") {
  const DiscreteDPP dpp = random_projection(10, 4, 11);
  const auto probs = enumerate_point_probs(dpp);
  CHECK(probs.size() == 210);
  double total = 0.0;
  for (const auto& [subset, p] : probs) {
    CHECK(subset.size() == 4);
    CHECK(p >= -1e-14);
    total += p;
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("janossy routes agree with enumeration") {
  const DiscreteDPP dpp = random_projection(8, 4, 21);
  for (const Subset& loci : {Subset{0}, Subset{3}, Subset{1, 5}}) {
    for (const Subset& region : {Subset{2, 6, 7}, Subset{4}, Subset{2, 4, 6, 7}}) {
      const double truth = janossy_bruteforce(dpp, loci, region);
      for (JanossyRoute route :
           {JanossyRoute::resolvent, JanossyRoute::block, JanossyRoute::transformed}) {
        CAPTURE(static_cast<int>(route));
        CHECK(std::abs(janossy_formula(dpp, loci, region, route) - truth) < 1e-12);
      }
    }
  }
}

TEST_CASE("extra-point probabilities") {
  const DiscreteDPP dpp = random_projection(8, 4, 22);
  const Subset loci{2};
  const Subset region{0, 1, 4, 5, 7};
  double total = 0.0;
  for (int p = 0; p <= 5; ++p) {
    const double truth = janossy_bruteforce(dpp, loci, region, p);
    CAPTURE(p);
    CHECK(std::abs(janossy_p_formula(dpp, loci, region, p) - truth) < 1e-12);
    CHECK(std::abs(janossy_p_generating(dpp, loci, region, p) - truth) < 1e-10);
    total += truth;
  }
  // summing over p releases the region: only the locus remains, probability K(l, l)
  CHECK(std::abs(total - dpp.kernel(2, 2)) < 1e-12);
  // a rank-4 process holds at most 3 points besides the locus
  CHECK(janossy_bruteforce(dpp, loci, region, 4) == 0.0);
  CHECK(std::abs(janossy_p_formula(dpp, loci, region, 4)) < 1e-12);
}

TEST_CASE("transformed kernel") {
  const DiscreteDPP dpp = random_projection(10, 5, 23);
  for (const Subset& loci : {Subset{0}, Subset{2, 7}, Subset{1, 4, 8}}) {
    const Eigen::MatrixXd kt = transformed_kernel(dpp, loci);
    CHECK((kt * kt - kt).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(kt.trace() - (5.0 - static_cast<double>(loci.size()))) < 1e-10);
    for (int l : loci) CHECK(kt.row(l).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("conditional correlations") {
  const DiscreteDPP dpp = random_projection(9, 5, 24);
  for (const Subset& points : {Subset{1}, Subset{1, 3}, Subset{3, 5, 8}}) {
    const auto [ratio, det] = conditional_correlation_check(dpp, {0}, points);
    CHECK(std::abs(ratio - det) < 1e-12);
  }
}

TEST_CASE("identity suite") {
  const DppSuiteReport report = run_identity_suite(20, 7);
  CHECK(report.instances == 20);
  CHECK(report.checks > 0);
  CHECK(report.passed());
  CHECK(report.max_route_error < 1e-10);
  CHECK(report.max_projection_error < 1e-9);
}
