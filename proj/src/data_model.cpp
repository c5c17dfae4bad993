#include "tsmc/data_model.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "tsmc/solver.hpp"

namespace tsmc {

namespace {

constexpr double kBudgetTol = 1e-6;

std::string describe(const std::string& id) { return ": " + id; }

}  // namespace

int month_index(int year, int month, int epoch_year, int epoch_month) {
  if (month < 1 || month > 12 || epoch_month < 1 || epoch_month > 12)
    throw DataError("invalid month");
  const int index = (year - epoch_year) * 12 + (month - epoch_month);
  if (index < 0) throw DataError("date before epoch");
  return index;
}

Dataset assemble(const std::vector<ExpenseRecord>& records,
                 const std::vector<ProjectMeta>& meta,
                 std::optional<int> horizon, std::optional<int> cutoff) {
  const Eigen::Index n = static_cast<Eigen::Index>(meta.size());
  if (n == 0) throw DataError("no projects");

  std::unordered_map<std::string, Eigen::Index> column;
  for (Eigen::Index j = 0; j < n; ++j) {
    const ProjectMeta& p = meta[static_cast<std::size_t>(j)];
    if (!column.emplace(p.project_id, j).second)
      throw DataError("duplicate project id" + describe(p.project_id));
    if (!(p.budget > 0.0))
      throw DataError("non-positive budget" + describe(p.project_id));
  }

  /* bucket ledger rows per project and absolute month; values are kept as a
   * sorted list so the summation order is independent of the record order */
  std::vector<std::map<int, std::vector<double>>> buckets(
      static_cast<std::size_t>(n));
  for (const ExpenseRecord& rec : records) {
    auto it = column.find(rec.project_id);
    if (it == column.end())
      throw DataError("unknown project id" + describe(rec.project_id));
    if (rec.expense < 0.0)
      throw DataError("negative expense" + describe(rec.project_id));
    if (rec.month_index < 0)
      throw DataError("negative month index" + describe(rec.project_id));
    buckets[static_cast<std::size_t>(it->second)][rec.month_index].push_back(
        rec.expense);
  }

  std::vector<int> starts(static_cast<std::size_t>(n), 0);
  std::vector<int> last_rel(static_cast<std::size_t>(n), 0);
  std::vector<std::optional<int>> ted_rel(static_cast<std::size_t>(n));
  std::vector<std::map<int, double>> spend(static_cast<std::size_t>(n));

  int needed = 1;
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t jj = static_cast<std::size_t>(j);
    const ProjectMeta& p = meta[jj];
    if (buckets[jj].empty())
      throw DataError("project has no expense records" + describe(p.project_id));
    starts[jj] = buckets[jj].begin()->first;
    last_rel[jj] = buckets[jj].rbegin()->first - starts[jj];
    for (auto& [month, values] : buckets[jj]) {
      std::sort(values.begin(), values.end());
      double sum = 0.0;
      for (double v : values) sum += v;
      spend[jj][month - starts[jj]] = sum;
    }
    needed = std::max(needed, last_rel[jj] + 1);
    if (p.status == ProjectStatus::ongoing && p.ted.has_value()) {
      const int rel = *p.ted - starts[jj];
      if (rel < 0)
        throw DataError("ted before first record" + describe(p.project_id));
      ted_rel[jj] = rel;
      needed = std::max(needed, rel + 1);
    }
  }

  const int m = horizon.value_or(needed);
  if (m < 1) throw DataError("horizon must be positive");
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t jj = static_cast<std::size_t>(j);
    if (last_rel[jj] >= m)
      throw DataError("month index beyond horizon" +
                      describe(meta[jj].project_id));
    if (ted_rel[jj].has_value() && *ted_rel[jj] >= m)
      throw DataError("ted beyond horizon" + describe(meta[jj].project_id));
  }

  Dataset ds;
  ds.matrix.x = Matrix::Zero(m, n);
  ds.matrix.mask = Mask::Constant(m, n, false);
  ds.matrix.budgets.resize(n);
  ds.matrix.horizon = m;
  ds.start_months = starts;

  long recorded_cells = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t jj = static_cast<std::size_t>(j);
    const ProjectMeta& p = meta[jj];
    ds.matrix.budgets(j) = p.budget;
    ds.matrix.project_ids.push_back(p.project_id);
    if (p.status == ProjectStatus::completed) ++ds.matrix.completed_count;

    double observed_sum = 0.0;
    for (int a = 0; a < m; ++a) {
      const auto rec = spend[jj].find(a);
      if (rec != spend[jj].end()) {
        ds.matrix.x(a, j) = rec->second / p.budget;
        ds.matrix.mask(a, j) = true;
        observed_sum += ds.matrix.x(a, j);
        ++recorded_cells;
        continue;
      }
      if (a < last_rel[jj]) {
        ds.matrix.mask(a, j) = true;  // closed books, no spend that month
        continue;
      }
      /* past the last record */
      if (p.status == ProjectStatus::completed) {
        ds.matrix.mask(a, j) = true;
      } else if (ted_rel[jj].has_value() && a > *ted_rel[jj]) {
        ds.matrix.mask(a, j) = true;  // contract is over; nothing to spend
      }
      /* otherwise missing: still forecastable */
    }

    if (observed_sum > 1.0 + kBudgetTol)
      throw DataError("over budget" + describe(p.project_id));
    if (p.status == ProjectStatus::completed && observed_sum < 1.0 - kBudgetTol)
      throw DataError("completed project does not exhaust budget" +
                      describe(p.project_id));
  }

  ds.training_record_cells = recorded_cells;
  if (cutoff.has_value()) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t jj = static_cast<std::size_t>(j);
      for (const auto& [a, value] : spend[jj]) {
        if (starts[jj] + a < *cutoff) continue;
        ds.held_out.push_back(
            {a, static_cast<int>(j), ds.matrix.x(a, j)});
        ds.matrix.x(a, j) = 0.0;
        ds.matrix.mask(a, j) = false;
        --ds.training_record_cells;
      }
    }
  }
  return ds;
}

double residual_fraction(const ExpenseMatrix& matrix, Eigen::Index col) {
  if (col < 0 || col >= matrix.x.cols()) throw DataError("column out of range");
  try {
    return column_residual(matrix.x, matrix.mask, col);
  } catch (const DataError&) {
    throw DataError("over budget" + describe(matrix.project_ids[
        static_cast<std::size_t>(col)]));
  }
}

}  // namespace tsmc
