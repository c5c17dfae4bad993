#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsmc/data_model.hpp"
#include "tsmc/types.hpp"

namespace tsmc {

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12
};

/* Ledger file contents.  epoch is set when the file used calendar dates
 * (YYYY-MM); month indices are then months since that epoch, which is the
 * earliest date in the file. */
struct IngestedExpenses {
  std::vector<ExpenseRecord> records;
  std::optional<YearMonth> epoch;
};

/* Shortest decimal string that round-trips the double. */
std::string format_double(double value);

std::string format_year_month(const YearMonth& epoch, int index);

/* Expenses CSV.  Header either `project_id,date,expense` with YYYY-MM dates
 * or `project_id,month_index,expense` with non-negative integers; detected
 * from the header line. */
IngestedExpenses read_expenses_csv(const std::string& path);

/* Projects CSV: `project_id,budget,ted,status`.  ted may be blank, a month
 * index, or (for dated ledgers) a YYYY-MM date; status is `completed` or
 * `ongoing`. */
std::vector<ProjectMeta> read_projects_csv(const std::string& path,
                                           const std::optional<YearMonth>& epoch);

/* Forecasts CSV: `project_id,month_index,predicted_expense,is_observed`,
 * projects in column order, months ascending; indices are absolute (the
 * project start plus the row). */
void write_forecasts_csv(const std::string& path, const Dataset& dataset,
                         const Matrix& predicted);

/* Pattern curves CSV: `month_index,component_1,...`. */
void write_patterns_csv(const std::string& path, const Matrix& cumulative);

/* Cluster labels CSV: `project_id,component` (labels 1-based). */
void write_clusters_csv(const std::string& path,
                        const std::vector<std::string>& project_ids,
                        const std::vector<int>& labels);

}  // namespace tsmc
