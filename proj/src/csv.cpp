#include "tsmc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tsmc {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw DataError("invalid number '" + text + "' in " + where);
  return value;
}

int parse_int(const std::string& text, const std::string& where) {
  int value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw DataError("invalid integer '" + text + "' in " + where);
  return value;
}

YearMonth parse_year_month(const std::string& text, const std::string& where) {
  if (text.size() != 7 || text[4] != '-')
    throw DataError("invalid date '" + text + "' in " + where);
  YearMonth ym;
  ym.year = parse_int(text.substr(0, 4), where);
  ym.month = parse_int(text.substr(5, 2), where);
  if (ym.month < 1 || ym.month > 12)
    throw DataError("invalid date '" + text + "' in " + where);
  return ym;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

std::string format_year_month(const YearMonth& epoch, int index) {
  const int months = (epoch.month - 1) + index;
  const int year = epoch.year + (months >= 0 ? months / 12 : 0);
  const int month = months % 12 + 1;
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d", year, month);
  return buffer;
}

IngestedExpenses read_expenses_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  const std::vector<std::string> header = split_line(strip_cr(line));

  bool dated = false;
  if (header == std::vector<std::string>{"project_id", "date", "expense"})
    dated = true;
  else if (header !=
           std::vector<std::string>{"project_id", "month_index", "expense"})
    throw DataError("unrecognized expenses header in " + path);

  struct Row {
    std::string id;
    YearMonth date;
    int index;
    double expense;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    const std::string where = path + " line " + std::to_string(line_no);
    if (fields.size() != 3) throw DataError("malformed row in " + where);
    Row row;
    row.id = fields[0];
    if (dated)
      row.date = parse_year_month(fields[1], where);
    else
      row.index = parse_int(fields[1], where);
    row.expense = parse_double(fields[2], where);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no expense rows in " + path);

  IngestedExpenses out;
  if (dated) {
    YearMonth epoch = rows.front().date;
    for (const Row& row : rows) {
      if (row.date.year < epoch.year ||
          (row.date.year == epoch.year && row.date.month < epoch.month))
        epoch = row.date;
    }
    out.epoch = epoch;
    for (const Row& row : rows)
      out.records.push_back(
          {row.id,
           month_index(row.date.year, row.date.month, epoch.year, epoch.month),
           row.expense});
  } else {
    for (const Row& row : rows)
      out.records.push_back({row.id, row.index, row.expense});
  }
  return out;
}

std::vector<ProjectMeta> read_projects_csv(
    const std::string& path, const std::optional<YearMonth>& epoch) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  if (split_line(strip_cr(line)) !=
      std::vector<std::string>{"project_id", "budget", "ted", "status"})
    throw DataError("unrecognized projects header in " + path);

  std::vector<ProjectMeta> meta;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    const std::string where = path + " line " + std::to_string(line_no);
    if (fields.size() != 4) throw DataError("malformed row in " + where);

    ProjectMeta p;
    p.project_id = fields[0];
    p.budget = parse_double(fields[1], where);
    if (!fields[2].empty()) {
      if (fields[2].find('-') != std::string::npos) {
        if (!epoch.has_value())
          throw DataError("ted date requires dated expenses in " + where);
        const YearMonth ym = parse_year_month(fields[2], where);
        p.ted = month_index(ym.year, ym.month, epoch->year, epoch->month);
      } else {
        p.ted = parse_int(fields[2], where);
      }
    }
    if (fields[3] == "completed")
      p.status = ProjectStatus::completed;
    else if (fields[3] == "ongoing")
      p.status = ProjectStatus::ongoing;
    else
      throw DataError("invalid status '" + fields[3] + "' in " + where);
    meta.push_back(std::move(p));
  }
  if (meta.empty()) throw DataError("no projects in " + path);
  return meta;
}

void write_forecasts_csv(const std::string& path, const Dataset& dataset,
                         const Matrix& predicted) {
  const ExpenseMatrix& matrix = dataset.matrix;
  if (predicted.rows() != matrix.x.rows() || predicted.cols() != matrix.x.cols())
    throw DataError("forecast shape mismatch");
  std::ofstream out = open_output(path);
  out << "project_id,month_index,predicted_expense,is_observed\n";
  for (Eigen::Index j = 0; j < predicted.cols(); ++j) {
    const std::size_t jj = static_cast<std::size_t>(j);
    for (Eigen::Index a = 0; a < predicted.rows(); ++a) {
      out << matrix.project_ids[jj] << ','
          << dataset.start_months[jj] + static_cast<int>(a) << ','
          << format_double(predicted(a, j)) << ','
          << (matrix.mask(a, j) ? 1 : 0) << '\n';
    }
  }
}

void write_patterns_csv(const std::string& path, const Matrix& cumulative) {
  std::ofstream out = open_output(path);
  out << "month_index";
  for (Eigen::Index f = 0; f < cumulative.cols(); ++f)
    out << ",component_" << (f + 1);
  out << '\n';
  for (Eigen::Index a = 0; a < cumulative.rows(); ++a) {
    out << a;
    for (Eigen::Index f = 0; f < cumulative.cols(); ++f)
      out << ',' << format_double(cumulative(a, f));
    out << '\n';
  }
}

void write_clusters_csv(const std::string& path,
                        const std::vector<std::string>& project_ids,
                        const std::vector<int>& labels) {
  if (project_ids.size() != labels.size())
    throw DataError("cluster label count mismatch");
  std::ofstream out = open_output(path);
  out << "project_id,component\n";
  for (std::size_t j = 0; j < project_ids.size(); ++j)
    out << project_ids[j] << ',' << labels[j] << '\n';
}

}  // namespace tsmc
