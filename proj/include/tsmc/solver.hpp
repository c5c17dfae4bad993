#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "tsmc/types.hpp"

namespace tsmc {

/* Which point the prox-linear step moves from.  The gradient is always
 * evaluated at the extrapolated point; `extrapolated` also steps from it
 * (the standard accelerated block scheme), `paper_literal` steps from the
 * current iterate instead. */
enum class GradientBase { extrapolated, paper_literal };

struct FitConfig {
  int rank = 3;
  int max_iters = 100;
  double tol = 1e-4;  // stopping threshold on the objective decrease
  std::uint64_t seed = 42;
  GradientBase gradient_base = GradientBase::extrapolated;
  bool monotone_safeguard = true;  // redo uphill iterations without momentum
  double step_floor = 1e-12;       // lower bound on the step denominators
  bool relative_tol = false;       // interpret tol as decrease / previous value
};

/* W: M x F, columns on the unit simplex (spending pattern per component).
 * H: N x F, rows on the unit simplex (component mix per project). */
struct FactorModel {
  Matrix w;
  Matrix h;
};

/* Mutable state threaded through the iterations. */
struct CompletionState {
  Matrix z;  // completed M x N matrix; observed cells frozen to X
  Matrix w_prev;
  Matrix h_prev;
  double t_prev = 0.0;
  double t_cur = 1.0;
  int iteration = 0;
  std::vector<double> objective_trace;  // f after init, then after each iteration
};

struct FitResult {
  FactorModel model;
  Matrix z;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

struct NesterovStep {
  double t_next;
  double beta;
};

/* || W H^T - Z ||_F^2 */
double objective(const Matrix& w, const Matrix& h, const Matrix& z);

/* Gradients of objective() in W and H: 2 (W H^T - Z) H and its mirror. */
Matrix objective_gradient_w(const Matrix& w, const Matrix& h, const Matrix& z);
Matrix objective_gradient_h(const Matrix& w, const Matrix& h, const Matrix& z);

/* Largest eigenvalue of A^T A (the block step denominators). */
double gram_spectral_norm(const Matrix& a);

/* t_next = (1 + sqrt(4 t_cur^2 + 1)) / 2,  beta = (t_cur - 1) / t_next,
 * clamped at 0.  The t sequence starts from t_prev = 0, t_cur = 1. */
NesterovStep nesterov_step(double t_prev, double t_cur);

/* Residual budget fraction of column `col`: 1 minus the observed sum.
 * Values in [-1e-6, 0] clamp to 0; below that throws
 * DataError("budget exceeded by observations"). */
double column_residual(const Matrix& x, const Mask& mask, Eigen::Index col);

/* Seeded uniform(0,1) factors normalized onto their simplexes; Z gets the
 * observed entries of X and splits each column's residual uniformly over
 * its missing cells.  Throws SolverError("rank too large") when
 * rank >= min(M, N). */
std::pair<FactorModel, CompletionState> initialize(const Matrix& x,
                                                   const Mask& mask,
                                                   const FitConfig& cfg);

/* One extrapolated prox-linear update of W (columns projected back onto the
 * simplex), with step 1 / max(lambda_max(H^T H), step_floor). */
Matrix update_w(const Matrix& w, const Matrix& w_prev, const Matrix& h,
                const Matrix& z, double beta, const FitConfig& cfg);

/* Mirror update of H (rows projected), stepping with lambda_max(W^T W) of
 * the just-updated W. */
Matrix update_h(const Matrix& h, const Matrix& h_prev, const Matrix& w,
                const Matrix& z, double beta, const FitConfig& cfg);

/* Exact minimizer of the Z block: observed cells copied from X, each
 * column's missing cells projected onto the scaled simplex whose total is
 * the column residual. */
Matrix update_z(const Matrix& w, const Matrix& h, const Matrix& x,
                const Mask& mask);

using IterationCallback =
    std::function<void(int iteration, const FactorModel&, const CompletionState&)>;

/* Full alternating fit.  Stops when the objective decrease drops below
 * cfg.tol or after cfg.max_iters iterations.  With the monotone safeguard a
 * momentum step that raises the objective is redone with beta = 0 and the
 * t sequence restarts, so objective_trace never increases.  Deterministic:
 * identical inputs and config give bit-identical results. */
FitResult fit(const Matrix& x, const Mask& mask, const Vector& budgets,
              const FitConfig& cfg, const IterationCallback& on_iteration = {});

/* Back to currency units: column n scaled by budgets[n]. */
Matrix denormalize(const Matrix& z, const Vector& budgets);

}  // namespace tsmc
