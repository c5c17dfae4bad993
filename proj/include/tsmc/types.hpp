#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tsmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/* Problems with the input data (bad ledgers, budget violations, unreadable
 * files). The CLI reports these as exit code 2. */
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/* Numerical or usage failures inside the solver itself.  Exit code 3. */
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tsmc
