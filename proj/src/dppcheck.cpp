#include "janossy/dppcheck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "janossy/error.hpp"

namespace janossy {

namespace {

using Mask = std::uint32_t;

Mask to_mask(const Subset& s) {
  Mask m = 0;
  for (int i : s) m |= Mask{1} << i;
  return m;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& k, const Subset& rows, const Subset& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = k(rows[i], cols[j]);
  }
  return out;
}

double det(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 1.0 : m.partialPivLu().determinant();
}

Subset minus(const Subset& a, const Subset& b) {
  Subset out;
  for (int x : a) {
    if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
  }
  return out;
}

Eigen::PartialPivLU<Eigen::MatrixXd> guarded_lu(const Eigen::MatrixXd& m, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  if (m.size() > 0 && lu.rcond() < 1e-12) throw SingularityError(what);
  return lu;
}

void check_indices(const DiscreteDPP& dpp, const Subset& s) {
  const int n = static_cast<int>(dpp.kernel.rows());
  for (int i : s) {
    if (i < 0 || i >= n) throw DomainError("dppcheck: index outside the ground set");
  }
}

// Probabilities of all configurations, keyed by bitmask.
std::vector<std::pair<Mask, double>> configurations(const DiscreteDPP& dpp) {
  const int n = static_cast<int>(dpp.kernel.rows());
  if (n > 12) throw DomainError("dppcheck: ground set larger than 12");
  std::vector<std::pair<Mask, double>> out;
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (std::popcount(m) != dpp.rank) continue;
    Subset s;
    for (int i = 0; i < n; ++i) {
      if (m >> i & 1u) s.push_back(i);
    }
    out.emplace_back(m, det(submatrix(dpp.kernel, s, s)));
  }
  return out;
}

// Coefficients of prod_i (1 - z lambda_i) at z = 1, scaled to give J_{k,p}.
std::vector<double> extra_counts(const std::vector<double>& lambdas, int pmax) {
  std::vector<double> c(pmax + 1, 0.0);
  c[0] = 1.0;
  for (double l : lambdas) {
    for (int p = pmax; p >= 1; --p) c[p] = (1.0 - l) * c[p] + l * c[p - 1];
    c[0] *= 1.0 - l;
  }
  return c;
}

}  // namespace

DiscreteDPP make_dpp(const Eigen::MatrixXd& kernel) {
  if (kernel.rows() != kernel.cols()) throw DomainError("make_dpp: kernel not square");
  if ((kernel - kernel.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("make_dpp: kernel not symmetric");
  }
  if ((kernel * kernel - kernel).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("make_dpp: kernel not a projection");
  }
  const double tr = kernel.trace();
  if (std::abs(tr - std::round(tr)) > 1e-10) throw DomainError("make_dpp: non-integer trace");
  return {kernel, static_cast<int>(std::lround(tr))};
}

DiscreteDPP random_projection(int n, int rank, std::uint64_t seed) {
  if (!(rank > 0 && rank <= n && n <= 12)) {
    throw DomainError("random_projection: need 0 < N <= n <= 12");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(n, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = gauss(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd v = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
  Eigen::MatrixXd k = v * v.transpose();
  k = 0.5 * (k + k.transpose());
  return {k, rank};
}

std::map<Subset, double> enumerate_point_probs(const DiscreteDPP& dpp) {
  std::map<Subset, double> out;
  const int n = static_cast<int>(dpp.kernel.rows());
  for (const auto& [m, p] : configurations(dpp)) {
    Subset s;
    for (int i = 0; i < n; ++i) {
      if (m >> i & 1u) s.push_back(i);
    }
    out.emplace(std::move(s), p);
  }
  return out;
}

double janossy_bruteforce(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                          int extra) {
  check_indices(dpp, loci);
  check_indices(dpp, region);
  const Mask l = to_mask(loci);
  const Mask free = to_mask(region) & ~l;
  double total = 0.0;
  for (const auto& [m, p] : configurations(dpp)) {
    if ((m & l) == l && std::popcount(m & free) == extra) total += p;
  }
  return total;
}

double janossy_formula(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                       JanossyRoute route) {
  check_indices(dpp, loci);
  check_indices(dpp, region);
  const auto& K = dpp.kernel;
  const Subset rest = minus(region, loci);
  switch (route) {
    case JanossyRoute::resolvent: {
      // gap-conditioned kernel K + K_{.I} (1 - K_I)^{-1} K_{I.} at the loci
      const Eigen::MatrixXd gap =
          Eigen::MatrixXd::Identity(region.size(), region.size()) -
          submatrix(K, region, region);
      const auto lu = guarded_lu(gap, "janossy_formula: 1 - K_I is singular");
      const Eigen::MatrixXd kli = submatrix(K, loci, region);
      const Eigen::MatrixXd r =
          submatrix(K, loci, loci) + kli * lu.solve(kli.transpose());
      return det(gap) * det(r);
    }
    case JanossyRoute::block: {
      const int k = static_cast<int>(loci.size());
      const int q = static_cast<int>(rest.size());
      Eigen::MatrixXd b(k + q, k + q);
      b.topLeftCorner(k, k) = -submatrix(K, loci, loci);
      b.topRightCorner(k, q) = -submatrix(K, loci, rest);
      b.bottomLeftCorner(q, k) = -submatrix(K, rest, loci);
      b.bottomRightCorner(q, q) = Eigen::MatrixXd::Identity(q, q) - submatrix(K, rest, rest);
      return (k % 2 == 0 ? 1.0 : -1.0) * det(b);
    }
    case JanossyRoute::transformed: {
      const Eigen::MatrixXd kt = transformed_kernel(dpp, loci);
      const Eigen::MatrixXd kappa = submatrix(K, loci, loci);
      return det(kappa) *
             det(Eigen::MatrixXd::Identity(rest.size(), rest.size()) - submatrix(kt, rest, rest));
    }
  }
  throw DomainError("janossy_formula: unknown route");
}

Eigen::MatrixXd transformed_kernel(const DiscreteDPP& dpp, const Subset& loci) {
  check_indices(dpp, loci);
  const auto& K = dpp.kernel;
  if (loci.empty()) return K;
  Subset all(K.rows());
  for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
  const Eigen::MatrixXd kappa = submatrix(K, loci, loci);
  const auto lu = guarded_lu(kappa, "transformed_kernel: kappa is singular");
  const Eigen::MatrixXd k = submatrix(K, loci, all);
  return K - k.transpose() * lu.solve(k);
}

double janossy_p_formula(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                         int extra) {
  const Subset rest = minus(region, loci);
  if (extra < 0) throw DomainError("janossy_p_formula: p must be >= 0");
  if (extra > static_cast<int>(rest.size())) return 0.0;
  const Eigen::MatrixXd kt = transformed_kernel(dpp, loci);
  const Eigen::MatrixXd sub = submatrix(kt, rest, rest);
  std::vector<double> lambdas;
  if (sub.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      lambdas.push_back(eig.eigenvalues()(i));
    }
  }
  return det(submatrix(dpp.kernel, loci, loci)) * extra_counts(lambdas, extra)[extra];
}

double janossy_p_generating(const DiscreteDPP& dpp, const Subset& loci, const Subset& region,
                            int extra) {
  check_indices(dpp, loci);
  check_indices(dpp, region);
  const Subset rest = minus(region, loci);
  if (extra < 0) throw DomainError("janossy_p_generating: p must be >= 0");
  if (extra > static_cast<int>(rest.size())) return 0.0;
  const auto& K = dpp.kernel;
  const int k = static_cast<int>(loci.size());
  const int q = static_cast<int>(rest.size());
  // f(z) = det [[kappa, -z k], [k^T, 1 - z K_rest]] is a polynomial of degree
  // <= q; its Taylor coefficients at z = 1 come from a trapezoid rule on the
  // unit circle around 1, exact once the node count exceeds the degree.
  const int nodes = 32;
  std::complex<double> coeff = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const std::complex<double> e = std::polar(1.0, 2.0 * std::numbers::pi * j / nodes);
    const std::complex<double> z = 1.0 + e;
    Eigen::MatrixXcd b(k + q, k + q);
    b.topLeftCorner(k, k) = submatrix(K, loci, loci).cast<std::complex<double>>();
    b.topRightCorner(k, q) = -z * submatrix(K, loci, rest).cast<std::complex<double>>();
    b.bottomLeftCorner(q, k) = submatrix(K, rest, loci).cast<std::complex<double>>();
    b.bottomRightCorner(q, q) =
        Eigen::MatrixXcd::Identity(q, q) - z * submatrix(K, rest, rest).cast<std::complex<double>>();
    const std::complex<double> f = b.size() == 0 ? 1.0 : b.partialPivLu().determinant();
    coeff += f * std::pow(e, -extra);
  }
  coeff /= static_cast<double>(nodes);
  return (extra % 2 == 0 ? 1.0 : -1.0) * coeff.real();
}

std::pair<double, double> conditional_correlation_check(const DiscreteDPP& dpp,
                                                        const Subset& loci,
                                                        const Subset& points) {
  for (int x : points) {
    if (std::find(loci.begin(), loci.end(), x) != loci.end()) {
      throw DomainError("conditional_correlation_check: points overlap the loci");
    }
  }
  const auto& K = dpp.kernel;
  Subset joint = points;
  joint.insert(joint.end(), loci.begin(), loci.end());
  const double kappa = det(submatrix(K, loci, loci));
  if (std::abs(kappa) < 1e-12) throw SingularityError("conditional_correlation_check: kappa");
  const Eigen::MatrixXd kt = transformed_kernel(dpp, loci);
  return {det(submatrix(K, joint, joint)) / kappa, det(submatrix(kt, points, points))};
}

DppSuiteReport run_identity_suite(int instances, std::uint64_t seed) {
  DppSuiteReport rep;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto upd = [](double& slot, double err) { slot = std::max(slot, std::abs(err)); };
  for (int inst = 0; inst < instances; ++inst) {
    const int n = uniform(4, 12);
    const int rank = uniform(1, n - 1);
    const DiscreteDPP dpp = random_projection(n, rank, rng());
    Subset perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    const int k = uniform(0, std::min({2, rank, n - rank}));
    Subset loci(perm.begin(), perm.begin() + k);
    std::sort(loci.begin(), loci.end());
    // region: the loci (every fourth instance leaves one out) plus a random
    // part of the remaining sites
    Subset region;
    const bool lifted = k > 0 && inst % 4 == 3;
    for (int i = 0; i < k; ++i) {
      if (!(lifted && i == 0)) region.push_back(loci[i]);
    }
    // 1 - K_I stays invertible while |I| <= n - N
    const int room = n - rank - static_cast<int>(region.size());
    const int extra_sites = room > 0 ? uniform(0, room) : 0;
    for (int i = 0; i < extra_sites; ++i) region.push_back(perm[k + i]);
    std::sort(region.begin(), region.end());

    const double brute = janossy_bruteforce(dpp, loci, region);
    for (auto route : {JanossyRoute::resolvent, JanossyRoute::block, JanossyRoute::transformed}) {
      upd(rep.max_route_error, janossy_formula(dpp, loci, region, route) - brute);
      ++rep.checks;
    }
    const int free_sites = static_cast<int>(minus(region, loci).size());
    const double kappa = det(submatrix(dpp.kernel, loci, loci));
    double sum = 0.0;
    for (int p = 0; p <= free_sites + 1; ++p) {
      const double bp = janossy_bruteforce(dpp, loci, region, p);
      const double fp = janossy_p_formula(dpp, loci, region, p);
      upd(rep.max_extra_error, fp - bp);
      upd(rep.max_extra_error, janossy_p_generating(dpp, loci, region, p) - bp);
      sum += fp;
      rep.checks += 2;
    }
    upd(rep.max_extra_error, sum - kappa);

    const Eigen::MatrixXd kt = transformed_kernel(dpp, loci);
    upd(rep.max_projection_error, (kt * kt - kt).cwiseAbs().maxCoeff());
    upd(rep.max_projection_error, kt.trace() - (rank - k));
    rep.checks += 2;

    const Subset others(perm.begin() + k, perm.end());
    const int npts = uniform(1, std::min(2, static_cast<int>(others.size())));
    const Subset points(others.begin(), others.begin() + npts);
    const auto [ratio, direct] = conditional_correlation_check(dpp, loci, points);
    upd(rep.max_correlation_error, ratio - direct);
    ++rep.checks;
    ++rep.instances;
  }
  return rep;
}

}  // namespace janossy
