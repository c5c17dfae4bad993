#pragma once

#include "tsmc/types.hpp"

namespace tsmc {

/* The scaled probability simplex { v in R^dim : v >= 0, sum(v) = total }. */
struct ScaledSimplex {
  int dim;
  double total;

  ScaledSimplex(int dim, double total);

  /* membership up to 1e-9 * max(1, total) on the sum constraint */
  bool contains(const Eigen::Ref<const Vector>& v) const;
};

/* Euclidean projection of v onto the scaled simplex with the given total.
 *
 * Sort-and-threshold: sort v descending, find the largest rho such that
 *   v_(rho) > (sum of the rho largest entries - total) / rho,
 * set theta to that quantity and return max(v - theta, 0) elementwise.
 * O(n log n); total == 0 short-circuits to the zero vector.
 *
 * Throws SolverError("infeasible simplex") for total < 0 and
 * SolverError("non-finite input") for NaN/Inf entries. */
Vector project_onto_scaled_simplex(const Eigen::Ref<const Vector>& v,
                                   double total);

/* Reference projection by exhaustive support enumeration, for testing the
 * fast path.  Tries every support set, solves the equality-constrained
 * least-squares problem on it (a uniform shift), keeps the feasible
 * candidates and returns the one closest to v.  Exponential in dim, so it
 * refuses dim > 12 with SolverError("oracle dimension limit").  Shares no
 * code with project_onto_scaled_simplex beyond input validation. */
Vector projection_oracle(const Eigen::Ref<const Vector>& v, double total);

}  // namespace tsmc
