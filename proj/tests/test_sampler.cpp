#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "janossy/distributions.hpp"
#include "janossy/error.hpp"
#include "janossy/sampler.hpp"

using namespace janossy;

namespace {

double mean_first(const SampleBatch& b) {
  double s = 0.0;
  for (const auto& p : b.pairs) s += p.first;
  return s / static_cast<double>(b.pairs.size());
}

std::vector<double> firsts(const SampleBatch& b) {
  std::vector<double> out;
  for (const auto& p : b.pairs) out.push_back(p.first);
  return out;
}

// Histogram of the first coordinate over consecutive edges; values outside
// go to `rest`.
std::vector<long> bin_first(const SampleBatch& b, const std::vector<double>& edges, long& rest) {
  std::vector<long> counts(edges.size() - 1, 0);
  rest = 0;
  for (const auto& p : b.pairs) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), p.first);
    if (it == edges.begin() || it == edges.end()) {
      ++rest;
    } else {
      ++counts[it - edges.begin() - 1];
    }
  }
  return counts;
}

}  // namespace

TEST_CASE("samples are reproducible and independent of the worker count") {
  const SampleBatch a = sample_gue_edge(32, 500, 99, 1);
  const SampleBatch b = sample_gue_edge(32, 500, 99, 3);
  CHECK(a.pairs == b.pairs);
  CHECK(a.count == 500);
  CHECK(a.pairs.size() == 500);
  CHECK(sample_gue_edge(32, 500, 100, 1).pairs != a.pairs);
  const SampleBatch w1 = sample_wishart_hard_edge(32, 1, 300, 5, 1);
  const SampleBatch w2 = sample_wishart_hard_edge(32, 1, 300, 5, 2);
  CHECK(w1.pairs == w2.pairs);
  CHECK(ensemble_name(a.ensemble) != ensemble_name(w1.ensemble));
}

TEST_CASE("extreme pairs are ordered") {
  for (const auto& p : sample_gue_edge(40, 2000, 1).pairs) CHECK(p.first >= p.second);
  for (const auto& p : sample_wishart_hard_edge(40, 0, 2000, 1).pairs) {
    CHECK(p.first <= p.second);
    CHECK(p.first >= 0.0);
  }
}

TEST_CASE("tridiagonal bisection matches a dense eigensolve") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int n : {2, 3, 10, 60}) {
    std::vector<double> d(n), e(n - 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = d[i] = g(rng);
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = e[i] = g(rng);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
    const auto [first, second] = tridiagonal_top_two(d, e);
    CAPTURE(n);
    CHECK(std::abs(first - ev(n - 1)) < 1e-12);
    CHECK(std::abs(second - ev(n - 2)) < 1e-12);
  }
}

TEST_CASE("bidiagonal bisection matches a dense SVD") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int n : {2, 5, 40}) {
    std::vector<double> d(n), e(n - 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = d[i] = std::abs(g(rng)) + 0.1;
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = e[i] = g(rng);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    const auto [first, second] = bidiagonal_bottom_two(d, e);
    CAPTURE(n);
    CHECK(std::abs(first - sv(n - 1)) < 1e-12);
    CHECK(std::abs(second - sv(n - 2)) < 1e-12);
  }
}

TEST_CASE("tridiagonal and dense GUE models agree in law") {
  const SampleBatch fast = sample_gue_edge(64, 20000, 7);
  const SampleBatch dense = sample_gue_edge_dense(64, 20000, 8);
  CHECK(ks_two_sample_pvalue(firsts(fast), firsts(dense)) > 0.01);
  std::vector<double> fs, ds;
  for (const auto& p : fast.pairs) fs.push_back(p.second);
  for (const auto& p : dense.pairs) ds.push_back(p.second);
  CHECK(ks_two_sample_pvalue(fs, ds) > 0.01);
}

TEST_CASE("largest GUE eigenvalue follows the soft-edge law") {
  const SampleBatch b = sample_gue_edge(128, 100000, 20241015);
  std::vector<double> edges;
  for (int i = 0; i <= 30; ++i) edges.push_back(-5.0 + 7.0 * i / 30.0);
  long rest = 0;
  const auto counts = bin_first(b, edges, rest);
  std::vector<double> probs;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    probs.push_back(gap_probability(FamilyTag::airy(), edges[i + 1], Route::nystrom) -
                    gap_probability(FamilyTag::airy(), edges[i], Route::nystrom));
  }
  const ChiSquareResult r = chi_square(counts, rest, probs);
  CAPTURE(r.statistic);
  CAPTURE(r.dof);
  CHECK(r.p_value > 0.01);
  CHECK(std::abs(mean_first(b) + 1.77) < 0.1);
}

TEST_CASE("smallest Wishart singular value follows the hard-edge law") {
  // nu = 0: P(first > x) = exp(-x^2 / 4)
  const SampleBatch b = sample_wishart_hard_edge(64, 0, 20000, 20241015);
  std::vector<double> edges;
  for (double x = 0.0; x <= 4.0 + 1e-9; x += 0.25) edges.push_back(x);
  long rest = 0;
  const auto counts = bin_first(b, edges, rest);
  std::vector<double> probs;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    probs.push_back(std::exp(-edges[i] * edges[i] / 4.0) -
                    std::exp(-edges[i + 1] * edges[i + 1] / 4.0));
  }
  const ChiSquareResult r = chi_square(counts, rest, probs);
  CAPTURE(r.statistic);
  CHECK(r.p_value > 1e-3);
  CHECK(std::abs(mean_first(b) - std::sqrt(std::numbers::pi)) < 0.03);
  // a larger order pushes the smallest value away from zero
  CHECK(mean_first(sample_wishart_hard_edge(64, 1, 5000, 3)) > mean_first(b) + 0.3);
}

TEST_CASE("Wishart scale calibration") {
  // density of the smallest scaled singular value is 2s rho1(s^2) ~ s/2 near 0;
  // a wrong entry variance changes the slope by a constant factor
  const SampleBatch b = sample_wishart_hard_edge(64, 0, 100000, 77);
  const double width = 0.05, top = 0.4;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < static_cast<int>(top / width + 0.5); ++i) {
    const double lo = i * width, hi = lo + width;
    long n = 0;
    for (const auto& p : b.pairs) n += p.first >= lo && p.first < hi;
    const double mid = 0.5 * (lo + hi);
    const double density = static_cast<double>(n) / (static_cast<double>(b.pairs.size()) * width);
    sxy += mid * density;
    sxx += mid * mid;
  }
  const double slope = sxy / sxx;
  CAPTURE(slope);
  CHECK(std::abs(slope / 0.5 - 1.0) < 0.15);
}

TEST_CASE("uniform input gives a flat histogram") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SampleBatch b;
  for (int i = 0; i < 40000; ++i) b.pairs.emplace_back(u(rng), u(rng));
  b.count = 40000;
  std::vector<double> edges;
  for (int i = 0; i <= 10; ++i) edges.push_back(i / 10.0);
  const Histogram2D h = histogram2d(b, edges, edges);
  CHECK(h.outside == 0);
  double mass = 0.0;
  for (std::size_t i = 0; i < h.nx(); ++i) {
    for (std::size_t j = 0; j < h.ny(); ++j) mass += h.density(i, j) * 0.01;
  }
  CHECK(std::abs(mass - 1.0) < 1e-12);
  const ChiSquareResult r = compare(h, std::vector<double>(100, 0.01));
  CHECK(r.dof == 99);
  CHECK(r.p_value > 0.01);
}

TEST_CASE("two-dimensional histogram") {
  SampleBatch b;
  b.pairs = {{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {1.5, 1.2}, {3.0, 0.5}, {0.5, -1.0}};
  b.count = 6;
  const Histogram2D h = histogram2d(b, {0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
  CHECK(h.total == 6);
  CHECK(h.outside == 2);
  CHECK(h.at(0, 0) == 1);
  CHECK(h.at(0, 1) == 0);
  CHECK(h.at(1, 0) == 1);
  CHECK(h.at(1, 1) == 2);
  CHECK(h.density(1, 1) == doctest::Approx(2.0 / 6.0));
  const Histogram2D fine = histogram2d(b, {0.0, 0.5, 2.0}, {0.0, 2.0});
  CHECK(fine.density(1, 0) == doctest::Approx(4.0 / 6.0 / 3.0));
}

TEST_CASE("chi-square pooling") {
  // third cell expects 3 counts and joins the rest bin: expected 10, observed 8
  const ChiSquareResult r = chi_square({45, 47, 3}, 5, {0.45, 0.45, 0.03});
  const double statistic = 4.0 / 45.0 + 4.0 / 10.0;
  CHECK(r.pooled_bins == 1);
  CHECK(r.bins == 3);
  CHECK(r.dof == 2);
  CHECK(r.statistic == doctest::Approx(statistic).epsilon(1e-14));
  CHECK(r.p_value == doctest::Approx(std::exp(-statistic / 2.0)).epsilon(1e-12));
  const ChiSquareResult exact = chi_square({50, 50}, 0, {0.5, 0.5});
  CHECK(exact.statistic == 0.0);
  CHECK(exact.p_value == doctest::Approx(1.0));
  CHECK_THROWS_AS(chi_square({1, 2}, 0, {0.5}), DomainError);
  CHECK_THROWS_AS(chi_square({0, 0}, 0, {0.5, 0.5}), DomainError);
}

TEST_CASE("two-sample KS") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<double> a(3000), b(3000), c(3000);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng);
  for (auto& x : c) x = g(rng) + 0.2;
  CHECK(ks_two_sample_pvalue(a, b) > 0.01);
  CHECK(ks_two_sample_pvalue(a, c) < 1e-6);
  CHECK(ks_two_sample_pvalue(a, a) == doctest::Approx(1.0));
}

TEST_CASE("sampler preconditions") {
  CHECK_THROWS_AS(sample_gue_edge(1, 10, 1), DomainError);
  CHECK(sample_gue_edge(16, 0, 1).pairs.empty());
  CHECK_THROWS_AS(sample_gue_edge(16, -1, 1), DomainError);
  CHECK_THROWS_AS(sample_wishart_hard_edge(16, -1, 10, 1), DomainError);
}
