#include "tsmc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "tsmc/rng.hpp"

namespace tsmc {

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

double rmse(const Vector& truth, const Vector& estimate) {
  if (truth.size() == 0) throw std::invalid_argument("empty input");
  if (truth.size() != estimate.size())
    throw std::invalid_argument("length mismatch");
  return (truth - estimate).norm() / std::sqrt(static_cast<double>(truth.size()));
}

double relative_rmse(const Vector& truth, const Vector& estimate) {
  if (truth.size() == 0) throw std::invalid_argument("empty input");
  if (truth.size() != estimate.size())
    throw std::invalid_argument("length mismatch");
  const double norm = truth.norm();
  if (norm == 0.0) throw std::invalid_argument("zero-norm truth");
  return (truth - estimate).norm() / norm;
}

Matrix median_baseline(const Matrix& x, const Mask& mask) {
  Matrix out = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> observed;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (mask(i, j)) observed.push_back(x(i, j));
    const double median = median_of(std::move(observed));
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (!mask(i, j)) out(i, j) = median;
  }
  return out;
}

Matrix knn_baseline(const Matrix& x, const Mask& mask, int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  if (n < 2) throw std::invalid_argument("need at least two projects");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Matrix dist = Matrix::Constant(n, n, kInf);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      double sum = 0.0;
      Eigen::Index shared = 0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!mask(i, a) || !mask(i, b)) continue;
        const double d = x(i, a) - x(i, b);
        sum += d * d;
        ++shared;
      }
      if (shared == 0) continue;  // no common rows: unusable neighbour
      const double scaled =
          std::sqrt(sum * static_cast<double>(m) / static_cast<double>(shared));
      dist(a, b) = scaled;
      dist(b, a) = scaled;
    }
  }

  Matrix out = median_baseline(x, mask);  // per-cell fallback layer
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index b = 0; b < n; ++b)
      if (b != j && dist(j, b) < kInf) order.emplace_back(dist(j, b), b);
    std::sort(order.begin(), order.end());

    for (Eigen::Index i = 0; i < m; ++i) {
      if (mask(i, j)) continue;
      double sum = 0.0;
      int taken = 0;
      for (const auto& [d, b] : order) {
        if (!mask(i, b)) continue;
        sum += x(i, b);
        if (++taken == k) break;
      }
      if (taken > 0) out(i, j) = sum / taken;
    }
  }
  return out;
}

Matrix budget_rescale(const Matrix& completed, const Matrix& x,
                      const Mask& mask) {
  Matrix out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::vector<Eigen::Index> missing;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (!mask(i, j)) missing.push_back(i);
    if (missing.empty()) continue;

    const double residual = column_residual(x, mask, j);
    double sum = 0.0;
    for (Eigen::Index i : missing) sum += std::max(completed(i, j), 0.0);
    if (sum > 0.0) {
      const double scale = residual / sum;
      for (Eigen::Index i : missing)
        out(i, j) = std::max(completed(i, j), 0.0) * scale;
    } else {
      const double share = residual / static_cast<double>(missing.size());
      for (Eigen::Index i : missing) out(i, j) = share;
    }
  }
  return out;
}

SyntheticInstance synthesize(int m, int n, int f, double missing_rate,
                             std::uint64_t seed) {
  if (m < 1 || n < 1 || f < 1) throw std::invalid_argument("sizes must be positive");
  if (f >= std::min(m, n)) throw std::invalid_argument("rank too large");
  if (missing_rate < 0.0 || missing_rate >= 1.0)
    throw std::invalid_argument("missing rate must be in [0, 1)");

  Rng rng(seed);
  SyntheticInstance inst;

  inst.w_true.resize(m, f);
  for (int c = 0; c < f; ++c) {
    for (int i = 0; i < m; ++i) inst.w_true(i, c) = rng.exponential();
    const double sum = inst.w_true.col(c).sum();
    inst.w_true.col(c) /= sum > 0.0 ? sum : 1.0;
  }

  inst.h_true.resize(n, f);
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < f; ++c) inst.h_true(j, c) = rng.exponential();
    const double sum = inst.h_true.row(j).sum();
    inst.h_true.row(j) /= sum > 0.0 ? sum : 1.0;
  }

  inst.budgets.resize(n);
  for (int j = 0; j < n; ++j)
    inst.budgets(j) = std::pow(10.0, 4.0 + 3.0 * rng.uniform());

  /* contiguous missing tails of varying length, mimicking a portfolio of
   * projects at different stages of their lives */
  const int max_tail =
      std::min(m - 1, static_cast<int>(std::llround(2.0 * missing_rate * m)));
  inst.mask = Mask::Constant(m, n, true);
  for (int j = 0; j < n; ++j) {
    const int tail = rng.uniform_int(max_tail);
    for (int i = m - tail; i < m; ++i) inst.mask(i, j) = false;
  }

  inst.x_full = inst.w_true * inst.h_true.transpose();
  return inst;
}

std::vector<int> cluster_assign(const Matrix& h) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < h.cols(); ++c)
      if (h(j, c) > h(j, best)) best = c;
    labels.push_back(static_cast<int>(best) + 1);
  }
  return labels;
}

Matrix cumulative_patterns(const Matrix& w) {
  Matrix out = w;
  for (Eigen::Index i = 1; i < w.rows(); ++i)
    out.row(i) += out.row(i - 1);
  return out;
}

std::vector<EvalReport> run_evaluation(const Dataset& dataset,
                                       const std::vector<std::string>& methods,
                                       const FitConfig& cfg, int knn_k) {
  if (dataset.training_record_cells == 0) throw DataError("no training samples");
  if (dataset.held_out.empty()) throw DataError("no test samples");

  const ExpenseMatrix& matrix = dataset.matrix;
  const Eigen::Index n_test = static_cast<Eigen::Index>(dataset.held_out.size());

  Vector truth(n_test);
  for (Eigen::Index t = 0; t < n_test; ++t) {
    const HeldOutCell& cell = dataset.held_out[static_cast<std::size_t>(t)];
    truth(t) = cell.fraction * matrix.budgets(cell.col);
  }

  std::vector<EvalReport> reports;
  for (const std::string& method : methods) {
    Matrix completed;
    if (method == "tsmc") {
      completed = fit(matrix.x, matrix.mask, matrix.budgets, cfg).z;
    } else if (method == "median") {
      completed =
          budget_rescale(median_baseline(matrix.x, matrix.mask), matrix.x,
                         matrix.mask);
    } else if (method == "knn") {
      completed =
          budget_rescale(knn_baseline(matrix.x, matrix.mask, knn_k), matrix.x,
                         matrix.mask);
    } else {
      throw std::invalid_argument("unknown method: " + method);
    }

    Vector estimate(n_test);
    for (Eigen::Index t = 0; t < n_test; ++t) {
      const HeldOutCell& cell = dataset.held_out[static_cast<std::size_t>(t)];
      estimate(t) = completed(cell.row, cell.col) * matrix.budgets(cell.col);
    }
    reports.push_back({method, rmse(truth, estimate),
                       relative_rmse(truth, estimate),
                       static_cast<long>(n_test)});
  }
  return reports;
}

void write_reports_json(const std::string& path,
                        const std::vector<EvalReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const EvalReport& report : reports) {
    nlohmann::json row;
    row["method"] = report.method;
    row["rmse"] = report.rmse;
    row["relative_rmse"] = report.relative_rmse;
    row["n_test"] = report.n_test;
    out.push_back(row);
  }
  std::ofstream stream(path);
  if (!stream) throw DataError("cannot write file: " + path);
  stream << out.dump(2) << '\n';
}

}  // namespace tsmc
