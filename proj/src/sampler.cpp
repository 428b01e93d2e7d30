#include "janossy/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "janossy/error.hpp"
#include "janossy/parallel.hpp"

namespace janossy {

namespace {

constexpr long kSubBatch = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double chi(std::mt19937_64& rng, int dof) {
  std::chi_squared_distribution<double> d(dof);
  return std::sqrt(d(rng));
}

// Fills batch.pairs in sub-batches of fixed size; sub-batch b draws from a
// stream keyed on (seed, b), so output does not depend on the worker count
// and nearby seeds share no streams.
template <class Draw>
void fill(SampleBatch& batch, int threads, Draw draw) {
  if (batch.count < 0) throw DomainError("sampler: negative count");
  batch.pairs.resize(batch.count);
  const long blocks = (batch.count + kSubBatch - 1) / kSubBatch;
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    std::mt19937_64 rng(splitmix64(splitmix64(batch.seed) ^ splitmix64(~static_cast<std::uint64_t>(b))));
    const long lo = static_cast<long>(b) * kSubBatch;
    const long hi = std::min(batch.count, lo + kSubBatch);
    for (long i = lo; i < hi; ++i) batch.pairs[i] = draw(rng);
  });
}

// Number of eigenvalues of the tridiagonal matrix below x.
int sturm_count(const std::vector<double>& diag, const std::vector<double>& off2, double x) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    q = diag[i] - x - (i > 0 ? off2[i - 1] / q : 0.0);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (0-based) by bisection on [lo, hi].
double bisect(const std::vector<double>& diag, const std::vector<double>& off2, int k,
              double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(diag, off2, mid) > k) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

void check_size(int n) {
  if (n < 16) throw DomainError("sampler: matrix size must be >= 16");
}

}  // namespace

std::string ensemble_name(Ensemble e) {
  return e == Ensemble::gue_edge ? "gue" : "wishart";
}

std::pair<double, double> tridiagonal_top_two(const std::vector<double>& diag,
                                              const std::vector<double>& off) {
  const int n = static_cast<int>(diag.size());
  if (n < 2 || off.size() + 1 != diag.size()) {
    throw DomainError("tridiagonal_top_two: inconsistent sizes");
  }
  std::vector<double> off2(off.size());
  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  for (std::size_t i = 0; i < off.size(); ++i) off2[i] = off[i] * off[i];
  const double first = bisect(diag, off2, n - 1, lo, hi);
  const double second = bisect(diag, off2, n - 2, lo, first);
  return {first, second};
}

std::pair<double, double> bidiagonal_bottom_two(const std::vector<double>& diag,
                                                const std::vector<double>& super) {
  const int n = static_cast<int>(diag.size());
  if (n < 2 || super.size() + 1 != diag.size()) {
    throw DomainError("bidiagonal_bottom_two: inconsistent sizes");
  }
  // Golub-Kahan form: zero diagonal, off-diagonal d1, e1, d2, e2, ..., dn;
  // its eigenvalues are +-sigma_i, so the n-th and (n+1)-th smallest
  // eigenvalues are the two smallest singular values.
  std::vector<double> gk_diag(2 * n, 0.0), off2(2 * n - 1);
  double hi = 0.0;
  for (int i = 0; i < n; ++i) {
    off2[2 * i] = diag[i] * diag[i];
    if (i + 1 < n) off2[2 * i + 1] = super[i] * super[i];
    hi = std::max(hi, std::abs(diag[i]) + (i + 1 < n ? std::abs(super[i]) : 0.0) +
                          (i > 0 ? std::abs(super[i - 1]) : 0.0));
  }
  const double first = bisect(gk_diag, off2, n, 0.0, hi);
  const double second = bisect(gk_diag, off2, n + 1, first, hi);
  return {first, second};
}

SampleBatch sample_gue_edge(int n, long count, std::uint64_t seed, int threads) {
  check_size(n);
  SampleBatch batch{Ensemble::gue_edge, n, 0, count, seed, {}};
  const double center = std::sqrt(2.0 * n);
  const double scale = std::sqrt(2.0) * std::pow(n, 1.0 / 6.0);
  fill(batch, threads, [&](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<double> diag(n), off(n - 1);
    for (int i = 0; i < n; ++i) diag[i] = gauss(rng);
    for (int i = 0; i < n - 1; ++i) off[i] = 0.5 * chi(rng, 2 * (n - 1 - i));
    const auto [a, b] = tridiagonal_top_two(diag, off);
    return std::pair{scale * (a - center), scale * (b - center)};
  });
  return batch;
}

SampleBatch sample_gue_edge_dense(int n, long count, std::uint64_t seed, int threads) {
  check_size(n);
  SampleBatch batch{Ensemble::gue_edge, n, 0, count, seed, {}};
  const double center = std::sqrt(2.0 * n);
  const double scale = std::sqrt(2.0) * std::pow(n, 1.0 / 6.0);
  fill(batch, threads, [&](std::mt19937_64& rng) {
    std::normal_distribution<double> diag_gauss(0.0, std::sqrt(0.5));
    std::normal_distribution<double> part_gauss(0.0, 0.5);  // E|H_ij|^2 = 1/2
    Eigen::MatrixXcd h(n, n);
    for (int i = 0; i < n; ++i) {
      h(i, i) = diag_gauss(rng);
      for (int j = i + 1; j < n; ++j) {
        h(i, j) = std::complex<double>(part_gauss(rng), part_gauss(rng));
        h(j, i) = std::conj(h(i, j));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    return std::pair{scale * (ev(n - 1) - center), scale * (ev(n - 2) - center)};
  });
  return batch;
}

SampleBatch sample_wishart_hard_edge(int n, int nu, long count, std::uint64_t seed,
                                     int threads) {
  check_size(n);
  if (nu < 0) throw DomainError("sample_wishart_hard_edge: nu must be >= 0");
  SampleBatch batch{Ensemble::wishart_hard_edge, n, nu, count, seed, {}};
  const int m = n + nu;
  const double scale = std::sqrt(2.0 * n);
  fill(batch, threads, [&](std::mt19937_64& rng) {
    std::vector<double> diag(n), super(n - 1);
    for (int i = 0; i < n; ++i) diag[i] = chi(rng, 2 * (m - i));
    for (int i = 0; i < n - 1; ++i) super[i] = chi(rng, 2 * (n - 1 - i));
    const auto [a, b] = bidiagonal_bottom_two(diag, super);
    return std::pair{scale * a, scale * b};
  });
  return batch;
}

double Histogram2D::density(std::size_t i, std::size_t j) const {
  const double area = (x_edges[i + 1] - x_edges[i]) * (y_edges[j + 1] - y_edges[j]);
  return total == 0 ? 0.0 : static_cast<double>(at(i, j)) / (static_cast<double>(total) * area);
}

Histogram2D histogram2d(const SampleBatch& batch, const std::vector<double>& x_edges,
                        const std::vector<double>& y_edges) {
  auto valid = [](const std::vector<double>& e) {
    if (e.size() < 2) return false;
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (!(e[i] > e[i - 1])) return false;
    }
    return true;
  };
  if (!valid(x_edges) || !valid(y_edges)) {
    throw DomainError("histogram2d: bin edges must be increasing with at least one bin");
  }
  Histogram2D h{x_edges, y_edges, std::vector<long>((x_edges.size() - 1) * (y_edges.size() - 1), 0),
                0, 0};
  for (const auto& [x, y] : batch.pairs) {
    ++h.total;
    const auto ix = std::upper_bound(x_edges.begin(), x_edges.end(), x) - x_edges.begin() - 1;
    const auto iy = std::upper_bound(y_edges.begin(), y_edges.end(), y) - y_edges.begin() - 1;
    if (ix < 0 || iy < 0 || ix >= static_cast<long>(h.nx()) || iy >= static_cast<long>(h.ny())) {
      ++h.outside;
      continue;
    }
    ++h.counts[ix * h.ny() + iy];
  }
  return h;
}

ChiSquareResult chi_square(const std::vector<long>& observed, long observed_rest,
                           const std::vector<double>& probabilities) {
  if (observed.size() != probabilities.size()) {
    throw DomainError("chi_square: size mismatch");
  }
  const long total = std::accumulate(observed.begin(), observed.end(), observed_rest);
  if (total <= 0) throw DomainError("chi_square: no samples");
  const double n = static_cast<double>(total);
  double rest_p = 1.0 - std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  rest_p = std::max(rest_p, 0.0);
  long rest_obs = observed_rest;
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * probabilities[i];
    if (e < 5.0) {
      rest_p += std::max(probabilities[i], 0.0);
      rest_obs += observed[i];
      ++r.pooled_bins;
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
    ++r.bins;
  }
  const double rest_e = n * rest_p;
  if (rest_e >= 5.0 || (rest_obs > 0 && rest_e > 0.0)) {
    const double d = static_cast<double>(rest_obs) - rest_e;
    r.statistic += d * d / rest_e;
    ++r.bins;
  }
  r.dof = r.bins - 1;
  if (r.dof < 1) throw DomainError("chi_square: degenerate bins");
  r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

ChiSquareResult compare(const Histogram2D& h, const std::vector<double>& cell_probabilities) {
  return chi_square(h.counts, h.outside, cell_probabilities);
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample_pvalue: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  // Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
  if (lambda < 0.2) return 1.0;
  double q = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    q += term;
    if (std::abs(term) < 1e-12 * std::abs(q)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

}  // namespace janossy
