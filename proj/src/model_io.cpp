#include "tsmc/model_io.hpp"

#include <fstream>

#include "json.hpp"

namespace tsmc {

namespace {

using nlohmann::json;

json row_major(const Matrix& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

Matrix from_row_major(const json& values, Eigen::Index rows,
                      Eigen::Index cols) {
  if (static_cast<Eigen::Index>(values.size()) != rows * cols)
    throw DataError("corrupt model json: matrix size mismatch");
  Matrix a(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      a(i, j) = values[static_cast<std::size_t>(k++)].get<double>();
  return a;
}

}  // namespace

void write_model_json(const std::string& path, const PersistedModel& model) {
  json j;
  j["m"] = model.w.rows();
  j["n"] = model.h.rows();
  j["f"] = model.w.cols();
  j["w"] = row_major(model.w);
  j["h"] = row_major(model.h);
  j["budgets"] = json::array();
  for (Eigen::Index i = 0; i < model.budgets.size(); ++i)
    j["budgets"].push_back(model.budgets(i));
  j["project_ids"] = model.project_ids;
  j["objective_trace"] = model.objective_trace;
  j["converged"] = model.converged;

  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

PersistedModel read_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("corrupt model json: " + std::string(e.what()));
  }
  try {
    const auto m = j.at("m").get<Eigen::Index>();
    const auto n = j.at("n").get<Eigen::Index>();
    const auto f = j.at("f").get<Eigen::Index>();
    if (m < 1 || n < 1 || f < 1) throw DataError("corrupt model json: sizes");
    PersistedModel model;
    model.w = from_row_major(j.at("w"), m, f);
    model.h = from_row_major(j.at("h"), n, f);
    const auto budgets = j.at("budgets").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(budgets.size()) != n)
      throw DataError("corrupt model json: budget count");
    model.budgets = Eigen::Map<const Vector>(budgets.data(), n);
    model.project_ids = j.at("project_ids").get<std::vector<std::string>>();
    if (static_cast<Eigen::Index>(model.project_ids.size()) != n)
      throw DataError("corrupt model json: project id count");
    model.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    model.converged = j.at("converged").get<bool>();
    return model;
  } catch (const json::exception& e) {
    throw DataError("corrupt model json: " + std::string(e.what()));
  }
}

}  // namespace tsmc
