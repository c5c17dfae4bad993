#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsmc/types.hpp"

namespace tsmc {

/* One ledger row: spend of one project in one month.  month_index counts
 * months since the dataset epoch; several rows may hit the same month. */
struct ExpenseRecord {
  std::string project_id;
  int month_index = 0;
  double expense = 0.0;
};

enum class ProjectStatus { completed, ongoing };

struct ProjectMeta {
  std::string project_id;
  double budget = 0.0;
  std::optional<int> ted;  // targeted end date, months since the same epoch
  ProjectStatus status = ProjectStatus::ongoing;
};

/* Assembled problem instance.  Column n is project n (meta order); row m is
 * the m-th month of that project's life, so columns of different calendar
 * spans line up by project age.  X holds budget fractions, zero wherever
 * mask is false. */
struct ExpenseMatrix {
  Matrix x;
  Mask mask;
  Vector budgets;
  std::vector<std::string> project_ids;
  int horizon = 0;
  int completed_count = 0;
};

/* Ground truth for a cell hidden by the evaluation cutoff. */
struct HeldOutCell {
  int row = 0;
  int col = 0;
  double fraction = 0.0;
};

struct Dataset {
  ExpenseMatrix matrix;
  std::vector<HeldOutCell> held_out;  // cutoff-masked ledger cells
  std::vector<int> start_months;      // absolute month of each project's first record
  long training_record_cells = 0;     // ledger cells still observed after the cutoff
};

/* (year, month) -> months since the epoch month.  Throws DataError for
 * out-of-range months or dates before the epoch. */
int month_index(int year, int month, int epoch_year, int epoch_month);

/* Build the matrix view of the ledgers.
 *
 * Per project: duplicate months are summed, expenses divide by the budget,
 * and the month of the first record becomes row 0.  Months inside the
 * recorded span with no rows are observed zeros.  After the last record:
 * completed projects are observed zeros to the horizon; ongoing projects
 * with a TED are missing through the TED month (still spendable) and
 * observed zeros strictly after it; ongoing projects without a TED are
 * missing to the horizon.  Omitted horizon = smallest value covering every
 * recorded month and TED.
 *
 * With a cutoff, ledger cells dated at/after it are removed from the
 * observations and kept in Dataset::held_out as ground truth; derived zeros
 * (gaps, post-TED, completed tails) stay observed. */
Dataset assemble(const std::vector<ExpenseRecord>& records,
                 const std::vector<ProjectMeta>& meta,
                 std::optional<int> horizon = std::nullopt,
                 std::optional<int> cutoff = std::nullopt);

/* Remaining budget fraction of column col (see column_residual). */
double residual_fraction(const ExpenseMatrix& matrix, Eigen::Index col);

}  // namespace tsmc
