#pragma once

#include <string>
#include <vector>

#include "tsmc/types.hpp"

namespace tsmc {

/* On-disk model: the factor matrices plus everything needed to turn them
 * back into currency forecasts. */
struct PersistedModel {
  Matrix w;  // m x f
  Matrix h;  // n x f
  Vector budgets;
  std::vector<std::string> project_ids;
  std::vector<double> objective_trace;
  bool converged = false;
};

/* JSON object with keys m, n, f, w, h (row-major arrays), budgets,
 * project_ids, objective_trace, converged.  Serialization is deterministic,
 * so identical models produce identical files. */
void write_model_json(const std::string& path, const PersistedModel& model);

PersistedModel read_model_json(const std::string& path);

}  // namespace tsmc
