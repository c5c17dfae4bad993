#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmc/data_model.hpp"
#include "tsmc/solver.hpp"
#include "tsmc/types.hpp"

namespace tsmc {

struct EvalReport {
  std::string method;
  double rmse = 0.0;
  double relative_rmse = 0.0;
  long n_test = 0;
};

struct SyntheticInstance {
  Matrix x_full;  // exactly w_true * h_true^T; every column sums to 1
  Mask mask;
  Vector budgets;
  Matrix w_true;
  Matrix h_true;
};

/* ||truth - estimate||_2 / sqrt(n) */
double rmse(const Vector& truth, const Vector& estimate);

/* ||truth - estimate||_2 / ||truth||_2 */
double relative_rmse(const Vector& truth, const Vector& estimate);

/* Missing cell (m, n) <- median of row m's observed entries (0 when the row
 * has none).  Observed cells pass through. */
Matrix median_baseline(const Matrix& x, const Mask& mask);

/* Nearest-neighbour imputation.  Column distances are Euclidean over
 * co-observed rows scaled by sqrt(M / #co-observed); a missing cell takes
 * the mean of the k nearest columns observed at that row, falling back to
 * the median baseline when no usable neighbour exists. */
Matrix knn_baseline(const Matrix& x, const Mask& mask, int k);

/* Clamp the missing-cell predictions at zero and scale them, per column, so
 * they sum to the residual budget fraction (spread uniformly if they sum to
 * zero).  Observed cells are reset to X. */
Matrix budget_rescale(const Matrix& completed, const Matrix& x,
                      const Mask& mask);

/* Random instance with simplex factors drawn flat (normalized unit
 * exponentials), budgets log-uniform on [1e4, 1e7], and per-column
 * contiguous missing tails of varying length (uniform on
 * {0, ..., min(M-1, round(2 * missing_rate * M))}, so the expected missing
 * fraction is missing_rate).  Deterministic under the seed. */
SyntheticInstance synthesize(int m, int n, int f, double missing_rate,
                             std::uint64_t seed);

/* Dominant component per project: 1-based argmax of each H row, ties to the
 * lowest index. */
std::vector<int> cluster_assign(const Matrix& h);

/* Column-wise prefix sums of W: fraction of a component's budget spent by
 * each month.  Final row is all ones. */
Matrix cumulative_patterns(const Matrix& w);

/* Temporal train/test evaluation: fit (or impute) on the cutoff-masked data
 * and score the held-out ledger cells in currency units.  Methods are a
 * subset of {"tsmc", "median", "knn"}; reports come back in request order. */
std::vector<EvalReport> run_evaluation(const Dataset& dataset,
                                       const std::vector<std::string>& methods,
                                       const FitConfig& cfg, int knn_k);

/* EvalReport list as a JSON array. */
void write_reports_json(const std::string& path,
                        const std::vector<EvalReport>& reports);

}  // namespace tsmc
