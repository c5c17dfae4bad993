#include "tsmc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tsmc/rng.hpp"
#include "tsmc/simplex.hpp"

namespace tsmc {

namespace {

constexpr double kResidualTol = 1e-6;

void check_shapes(const Matrix& w, const Matrix& h, const Matrix& z) {
  if (w.cols() != h.cols() || w.rows() != z.rows() || h.rows() != z.cols())
    throw SolverError("shape mismatch");
}

}  // namespace

double objective(const Matrix& w, const Matrix& h, const Matrix& z) {
  check_shapes(w, h, z);
  return (w * h.transpose() - z).squaredNorm();
}

Matrix objective_gradient_w(const Matrix& w, const Matrix& h, const Matrix& z) {
  check_shapes(w, h, z);
  return 2.0 * (w * h.transpose() - z) * h;
}

Matrix objective_gradient_h(const Matrix& w, const Matrix& h, const Matrix& z) {
  check_shapes(w, h, z);
  return 2.0 * (h * w.transpose() - z.transpose()) * w;
}

double gram_spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

NesterovStep nesterov_step(double t_prev, double t_cur) {
  (void)t_prev;  // threaded for bookkeeping; the recurrence needs t_cur only
  const double t_next = 0.5 * (1.0 + std::sqrt(4.0 * t_cur * t_cur + 1.0));
  return {t_next, std::max((t_cur - 1.0) / t_next, 0.0)};
}

double column_residual(const Matrix& x, const Mask& mask, Eigen::Index col) {
  double observed = 0.0;
  for (Eigen::Index m = 0; m < x.rows(); ++m)
    if (mask(m, col)) observed += x(m, col);
  const double residual = 1.0 - observed;
  if (residual < -kResidualTol)
    throw DataError("budget exceeded by observations");
  return std::max(residual, 0.0);
}

std::pair<FactorModel, CompletionState> initialize(const Matrix& x,
                                                   const Mask& mask,
                                                   const FitConfig& cfg) {
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  if (mask.rows() != m || mask.cols() != n) throw SolverError("shape mismatch");
  if (cfg.rank < 1) throw SolverError("rank must be positive");
  if (cfg.rank >= std::min(m, n)) throw SolverError("rank too large");

  FactorModel model;
  Rng rng(cfg.seed);

  model.w.resize(m, cfg.rank);
  for (Eigen::Index f = 0; f < cfg.rank; ++f) {
    for (Eigen::Index i = 0; i < m; ++i) model.w(i, f) = rng.uniform();
    const double sum = model.w.col(f).sum();
    if (sum > 0.0)
      model.w.col(f) /= sum;
    else
      model.w.col(f).setConstant(1.0 / static_cast<double>(m));
  }

  model.h.resize(n, cfg.rank);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index f = 0; f < cfg.rank; ++f) model.h(j, f) = rng.uniform();
    const double sum = model.h.row(j).sum();
    if (sum > 0.0)
      model.h.row(j) /= sum;
    else
      model.h.row(j).setConstant(1.0 / static_cast<double>(cfg.rank));
  }

  CompletionState state;
  state.z = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<Eigen::Index> missing;
    for (Eigen::Index i = 0; i < m; ++i)
      if (!mask(i, j)) missing.push_back(i);
    if (missing.empty()) continue;
    const double share =
        column_residual(x, mask, j) / static_cast<double>(missing.size());
    for (Eigen::Index i : missing) state.z(i, j) = share;
  }

  state.w_prev = model.w;
  state.h_prev = model.h;
  state.t_prev = 0.0;
  state.t_cur = 1.0;
  state.iteration = 0;
  state.objective_trace.push_back(objective(model.w, model.h, state.z));
  return {std::move(model), std::move(state)};
}

Matrix update_w(const Matrix& w, const Matrix& w_prev, const Matrix& h,
                const Matrix& z, double beta, const FitConfig& cfg) {
  check_shapes(w, h, z);
  if (w_prev.rows() != w.rows() || w_prev.cols() != w.cols())
    throw SolverError("shape mismatch");

  const Matrix w_hat = w + beta * (w - w_prev);
  const double gamma = std::max(gram_spectral_norm(h), cfg.step_floor);
  const Matrix grad = (w_hat * h.transpose() - z) * h;
  const Matrix& base =
      cfg.gradient_base == GradientBase::extrapolated ? w_hat : w;
  const Matrix target = base - grad / gamma;
  if (!target.allFinite()) throw SolverError("degenerate step");

  Matrix out(w.rows(), w.cols());
  for (Eigen::Index f = 0; f < w.cols(); ++f)
    out.col(f) = project_onto_scaled_simplex(target.col(f), 1.0);
  return out;
}

Matrix update_h(const Matrix& h, const Matrix& h_prev, const Matrix& w,
                const Matrix& z, double beta, const FitConfig& cfg) {
  check_shapes(w, h, z);
  if (h_prev.rows() != h.rows() || h_prev.cols() != h.cols())
    throw SolverError("shape mismatch");

  const Matrix h_hat = h + beta * (h - h_prev);
  const double gamma = std::max(gram_spectral_norm(w), cfg.step_floor);
  const Matrix grad = (h_hat * w.transpose() - z.transpose()) * w;
  const Matrix& base =
      cfg.gradient_base == GradientBase::extrapolated ? h_hat : h;
  const Matrix target = base - grad / gamma;
  if (!target.allFinite()) throw SolverError("degenerate step");

  Matrix out(h.rows(), h.cols());
  for (Eigen::Index j = 0; j < h.rows(); ++j)
    out.row(j) =
        project_onto_scaled_simplex(target.row(j).transpose(), 1.0).transpose();
  return out;
}

Matrix update_z(const Matrix& w, const Matrix& h, const Matrix& x,
                const Mask& mask) {
  check_shapes(w, h, x);
  if (mask.rows() != x.rows() || mask.cols() != x.cols())
    throw SolverError("shape mismatch");

  const Matrix pred = w * h.transpose();
  Matrix z = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::vector<Eigen::Index> missing;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (!mask(i, j)) missing.push_back(i);
    if (missing.empty()) continue;  // fully observed column passes through

    const double residual = column_residual(x, mask, j);
    Vector sub(static_cast<Eigen::Index>(missing.size()));
    for (std::size_t k = 0; k < missing.size(); ++k)
      sub(static_cast<Eigen::Index>(k)) = pred(missing[k], j);
    const Vector projected = project_onto_scaled_simplex(sub, residual);
    for (std::size_t k = 0; k < missing.size(); ++k)
      z(missing[k], j) = projected(static_cast<Eigen::Index>(k));
  }
  return z;
}

FitResult fit(const Matrix& x, const Mask& mask, const Vector& budgets,
              const FitConfig& cfg, const IterationCallback& on_iteration) {
  if (budgets.size() != 0 && budgets.size() != x.cols())
    throw DataError("budget count mismatch");
  for (Eigen::Index j = 0; j < budgets.size(); ++j)
    if (!(budgets(j) > 0.0)) throw DataError("non-positive budget");

  auto [model, state] = initialize(x, mask, cfg);

  bool converged = false;
  int iter = 0;
  while (iter < cfg.max_iters) {
    const double f_prev = state.objective_trace.back();
    NesterovStep step = nesterov_step(state.t_prev, state.t_cur);

    Matrix w_new = update_w(model.w, state.w_prev, model.h, state.z, step.beta, cfg);
    Matrix h_new = update_h(model.h, state.h_prev, w_new, state.z, step.beta, cfg);
    Matrix z_new = update_z(w_new, h_new, x, mask);
    double f_new = objective(w_new, h_new, z_new);

    if (cfg.monotone_safeguard && f_new > f_prev) {
      /* momentum overshot: restart the t sequence and redo without it */
      state.t_prev = 0.0;
      state.t_cur = 1.0;
      step = nesterov_step(state.t_prev, state.t_cur);
      w_new = update_w(model.w, state.w_prev, model.h, state.z, 0.0, cfg);
      h_new = update_h(model.h, state.h_prev, w_new, state.z, 0.0, cfg);
      z_new = update_z(w_new, h_new, x, mask);
      f_new = objective(w_new, h_new, z_new);
    }

    state.w_prev = std::move(model.w);
    state.h_prev = std::move(model.h);
    model.w = std::move(w_new);
    model.h = std::move(h_new);
    state.z = std::move(z_new);
    state.t_prev = state.t_cur;
    state.t_cur = step.t_next;
    ++iter;
    state.iteration = iter;
    state.objective_trace.push_back(f_new);
    if (on_iteration) on_iteration(iter, model, state);

    const double decrease = std::max(f_prev - f_new, 0.0);
    const double criterion =
        cfg.relative_tol
            ? decrease / std::max(f_prev, std::numeric_limits<double>::min())
            : decrease;
    if (criterion < cfg.tol) {
      converged = true;
      break;
    }
  }

  FitResult result;
  result.model = std::move(model);
  result.z = std::move(state.z);
  result.objective_trace = std::move(state.objective_trace);
  result.iterations = iter;
  result.converged = converged;
  return result;
}

Matrix denormalize(const Matrix& z, const Vector& budgets) {
  if (budgets.size() != z.cols()) throw DataError("budget count mismatch");
  for (Eigen::Index j = 0; j < budgets.size(); ++j)
    if (!(budgets(j) > 0.0)) throw DataError("non-positive budget");
  return z * budgets.asDiagonal();
}

}  // namespace tsmc
