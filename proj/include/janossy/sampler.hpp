#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace janossy {

enum class Ensemble { gue_edge, wishart_hard_edge };

std::string ensemble_name(Ensemble e);

/// Scaled extreme pairs. GUE: (largest, second largest) of sqrt(2) N^{1/6}
/// (x - sqrt(2N)). Wishart: (smallest, second smallest) of sqrt(2N) sigma.
struct SampleBatch {
  Ensemble ensemble = Ensemble::gue_edge;
  int n = 0;
  int nu = 0;
  long count = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> pairs;
};

/// GUE with density proportional to exp(-Tr H^2), through its tridiagonal model.
SampleBatch sample_gue_edge(int n, long count, std::uint64_t seed, int threads = 0);
/// Same ensemble from dense Hermitian matrices (slow reference path).
SampleBatch sample_gue_edge_dense(int n, long count, std::uint64_t seed, int threads = 0);
/// N x (N + nu) complex Gaussian matrices with E|W_ij|^2 = 2, through the
/// bidiagonal model.
SampleBatch sample_wishart_hard_edge(int n, int nu, long count, std::uint64_t seed,
                                     int threads = 0);

/// Two largest eigenvalues of the symmetric tridiagonal matrix (diag, off),
/// by Sturm-sequence bisection.
std::pair<double, double> tridiagonal_top_two(const std::vector<double>& diag,
                                              const std::vector<double>& off);
/// Two smallest singular values of the upper bidiagonal matrix (diag, super).
std::pair<double, double> bidiagonal_bottom_two(const std::vector<double>& diag,
                                                const std::vector<double>& super);

struct Histogram2D {
  std::vector<double> x_edges, y_edges;
  std::vector<long> counts;  // row-major, x index outer
  long total = 0;
  long outside = 0;  // samples outside the grid

  std::size_t nx() const { return x_edges.size() - 1; }
  std::size_t ny() const { return y_edges.size() - 1; }
  long at(std::size_t i, std::size_t j) const { return counts[i * ny() + j]; }
  /// Count divided by total and cell area.
  double density(std::size_t i, std::size_t j) const;
};

Histogram2D histogram2d(const SampleBatch& batch, const std::vector<double>& x_edges,
                        const std::vector<double>& y_edges);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  int bins = 0;         // bins entering the statistic, the pooled one included
  int pooled_bins = 0;  // cells merged because their expected count is below 5
};

/// Pearson test of observed counts against probabilities. Cells with an
/// expected count below 5 are merged with the `rest` bin (outside the grid,
/// probability 1 - sum(probabilities)).
ChiSquareResult chi_square(const std::vector<long>& observed, long observed_rest,
                           const std::vector<double>& probabilities);

/// Compares a histogram with per-cell probabilities (same layout as counts).
ChiSquareResult compare(const Histogram2D& h, const std::vector<double>& cell_probabilities);

/// Asymptotic two-sample Kolmogorov-Smirnov p-value.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

}  // namespace janossy
