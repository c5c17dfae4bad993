#include "tsmc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace tsmc {

namespace {

void validate_input(const Eigen::Ref<const Vector>& v, double total) {
  if (v.size() < 1) throw SolverError("empty vector");
  if (!std::isfinite(total) || !v.allFinite())
    throw SolverError("non-finite input");
  if (total < 0.0) throw SolverError("infeasible simplex");
}

}  // namespace

ScaledSimplex::ScaledSimplex(int dim_, double total_)
    : dim(dim_), total(total_) {
  if (dim < 1) throw SolverError("simplex dimension must be positive");
  if (!std::isfinite(total)) throw SolverError("non-finite input");
  if (total < 0.0) throw SolverError("infeasible simplex");
}

bool ScaledSimplex::contains(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != dim) return false;
  if ((v.array() < 0.0).any()) return false;
  return std::abs(v.sum() - total) <= 1e-9 * std::max(1.0, total);
}

Vector project_onto_scaled_simplex(const Eigen::Ref<const Vector>& v,
                                   double total) {
  validate_input(v, total);
  const Eigen::Index n = v.size();
  if (total == 0.0) return Vector::Zero(n);

  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  /* theta for the largest rho with sorted[rho-1] strictly above the running
   * threshold; rho >= 1 is guaranteed for total > 0 */
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumsum += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumsum - total) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] > candidate) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

Vector projection_oracle(const Eigen::Ref<const Vector>& v, double total) {
  validate_input(v, total);
  if (v.size() > 12) throw SolverError("oracle dimension limit");
  const int n = static_cast<int>(v.size());

  double best_dist = std::numeric_limits<double>::infinity();
  Vector best = Vector::Zero(n);
  for (unsigned support = 0; support < (1u << n); ++support) {
    Vector z = Vector::Zero(n);
    const int count = __builtin_popcount(support);
    if (count == 0) {
      if (total != 0.0) continue;  // empty support only reaches sum == 0
    } else {
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        if (support & (1u << i)) sum += v[i];
      const double shift = (sum - total) / count;
      bool feasible = true;
      for (int i = 0; i < n; ++i) {
        if (!(support & (1u << i))) continue;
        z[i] = v[i] - shift;
        if (z[i] < 0.0) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
    }
    const double dist = (z - v).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = z;
    }
  }
  return best;
}

}  // namespace tsmc
