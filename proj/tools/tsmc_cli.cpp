// Command-line front end: fit, forecast, evaluate, synth.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsmc/csv.hpp"
#include "tsmc/data_model.hpp"
#include "tsmc/evaluation.hpp"
#include "tsmc/model_io.hpp"
#include "tsmc/solver.hpp"

namespace {

using namespace tsmc;

struct CliConfig {
  std::string data_path;
  std::string meta_path;
  std::string model_path = "model.json";
  std::string out_path;
  std::string patterns_path;
  std::string clusters_path;
  std::string out_dir = ".";
  int rank = 3;
  int max_iters = 100;
  double tol = 1e-4;
  std::uint64_t seed = 42;
  std::string cutoff;
  std::vector<std::string> methods{"tsmc", "median", "knn"};
  std::optional<int> horizon;
  int projects = 200;
  double missing_rate = 0.4;
  int knn_k = 10;
};

FitConfig fit_config(const CliConfig& cli) {
  FitConfig cfg;
  cfg.rank = cli.rank;
  cfg.max_iters = cli.max_iters;
  cfg.tol = cli.tol;
  cfg.seed = cli.seed;
  return cfg;
}

/* --cutoff accepts a plain month index or, for dated ledgers, YYYY-MM. */
std::optional<int> parse_cutoff(const std::string& text,
                                const std::optional<YearMonth>& epoch) {
  if (text.empty()) return std::nullopt;
  if (text.find('-') == std::string::npos) {
    try {
      return std::stoi(text);
    } catch (const std::exception&) {
      throw DataError("invalid cutoff: " + text);
    }
  }
  if (!epoch.has_value())
    throw DataError("cutoff date requires dated expenses");
  if (text.size() != 7 || text[4] != '-') throw DataError("invalid cutoff: " + text);
  const int year = std::stoi(text.substr(0, 4));
  const int month = std::stoi(text.substr(5, 2));
  return month_index(year, month, epoch->year, epoch->month);
}

Dataset load_dataset(const CliConfig& cli, std::optional<int> horizon_override,
                     bool use_cutoff) {
  const IngestedExpenses expenses = read_expenses_csv(cli.data_path);
  const std::vector<ProjectMeta> meta =
      read_projects_csv(cli.meta_path, expenses.epoch);
  const std::optional<int> cutoff =
      use_cutoff ? parse_cutoff(cli.cutoff, expenses.epoch) : std::nullopt;
  const std::optional<int> horizon =
      horizon_override.has_value() ? horizon_override : cli.horizon;
  return assemble(expenses.records, meta, horizon, cutoff);
}

void write_side_reports(const CliConfig& cli, const Matrix& w, const Matrix& h,
                        const std::vector<std::string>& project_ids) {
  if (!cli.patterns_path.empty())
    write_patterns_csv(cli.patterns_path, cumulative_patterns(w));
  if (!cli.clusters_path.empty())
    write_clusters_csv(cli.clusters_path, project_ids, cluster_assign(h));
}

int cmd_fit(const CliConfig& cli) {
  const Dataset dataset = load_dataset(cli, std::nullopt, true);
  const ExpenseMatrix& matrix = dataset.matrix;

  const FitResult result =
      fit(matrix.x, matrix.mask, matrix.budgets, fit_config(cli));

  write_model_json(cli.model_path,
                   {result.model.w, result.model.h, matrix.budgets,
                    matrix.project_ids, result.objective_trace,
                    result.converged});
  const std::string out_path =
      cli.out_path.empty() ? "forecasts.csv" : cli.out_path;
  write_forecasts_csv(out_path, dataset, denormalize(result.z, matrix.budgets));
  write_side_reports(cli, result.model.w, result.model.h, matrix.project_ids);

  std::cout << "projects=" << matrix.x.cols() << " horizon=" << matrix.horizon
            << " iterations=" << result.iterations
            << " objective=" << format_double(result.objective_trace.back())
            << " converged=" << (result.converged ? "true" : "false") << '\n';
  return 0;
}

int cmd_forecast(const CliConfig& cli) {
  const PersistedModel model = read_model_json(cli.model_path);
  const Dataset dataset =
      load_dataset(cli, static_cast<int>(model.w.rows()), true);
  const ExpenseMatrix& matrix = dataset.matrix;

  if (matrix.project_ids != model.project_ids)
    throw DataError("model does not match projects file");

  const Matrix z = update_z(model.w, model.h, matrix.x, matrix.mask);
  const std::string out_path =
      cli.out_path.empty() ? "forecasts.csv" : cli.out_path;
  write_forecasts_csv(out_path, dataset, denormalize(z, matrix.budgets));
  write_side_reports(cli, model.w, model.h, matrix.project_ids);

  std::cout << "projects=" << matrix.x.cols() << " horizon=" << matrix.horizon
            << " forecasts=" << out_path << '\n';
  return 0;
}

int cmd_evaluate(const CliConfig& cli) {
  const Dataset dataset = load_dataset(cli, std::nullopt, true);
  const std::vector<EvalReport> reports =
      run_evaluation(dataset, cli.methods, fit_config(cli), cli.knn_k);

  const std::string out_path = cli.out_path.empty() ? "report.json" : cli.out_path;
  write_reports_json(out_path, reports);
  for (const EvalReport& report : reports)
    std::cout << report.method << " rmse=" << format_double(report.rmse)
              << " relative_rmse=" << format_double(report.relative_rmse)
              << " n_test=" << report.n_test << '\n';
  return 0;
}

int cmd_synth(const CliConfig& cli) {
  const int m = cli.horizon.value_or(36);
  const SyntheticInstance inst =
      synthesize(m, cli.projects, cli.rank, cli.missing_rate, cli.seed);

  std::filesystem::create_directories(cli.out_dir);
  const std::string expenses_path = cli.out_dir + "/expenses.csv";
  const std::string projects_path = cli.out_dir + "/projects.csv";
  const std::string truth_path = cli.out_dir + "/truth.csv";

  /* Stagger the project start dates so the tail that synthesize() hid is
   * exactly what a calendar cutoff at `epoch + m` months hides again. */
  const YearMonth epoch{2015, 1};
  std::ofstream expenses(expenses_path);
  std::ofstream truth(truth_path);
  std::ofstream projects(projects_path);
  if (!expenses || !truth || !projects)
    throw DataError("cannot write into directory: " + cli.out_dir);
  expenses << "project_id,date,expense\n";
  truth << "project_id,date,expense\n";
  projects << "project_id,budget,ted,status\n";

  for (int j = 0; j < cli.projects; ++j) {
    int tail = 0;
    for (int i = 0; i < m; ++i)
      if (!inst.mask(i, j)) ++tail;
    const int start = tail;

    char id[32];
    std::snprintf(id, sizeof(id), "proj-%04d", j + 1);
    projects << id << ',' << format_double(inst.budgets(j)) << ",,completed\n";
    for (int i = 0; i < m; ++i) {
      const std::string row = std::string(id) + ',' +
                              format_year_month(epoch, start + i) + ',' +
                              format_double(inst.x_full(i, j) * inst.budgets(j));
      expenses << row << '\n';
      if (!inst.mask(i, j)) truth << row << '\n';
    }
  }

  std::cout << "wrote " << expenses_path << ", " << projects_path << ", "
            << truth_path << '\n'
            << "suggested evaluation cutoff: --cutoff "
            << format_year_month(epoch, m) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained expense forecasting via triple-simplex "
               "matrix completion"};
  app.require_subcommand(1);
  CliConfig cli;

  auto add_fit_flags = [&cli](CLI::App* cmd) {
    cmd->add_option("--rank", cli.rank, "Number of components")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-iters", cli.max_iters, "Iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tol", cli.tol, "Stopping tolerance on the objective decrease")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--seed", cli.seed, "Random seed")->capture_default_str();
  };
  auto add_data_flags = [&cli](CLI::App* cmd) {
    cmd->add_option("--data", cli.data_path, "Expenses CSV")->required();
    cmd->add_option("--meta", cli.meta_path, "Projects CSV")->required();
    cmd->add_option("--horizon", cli.horizon, "Months per project column")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model and write forecasts");
  add_data_flags(fit_cmd);
  add_fit_flags(fit_cmd);
  fit_cmd->add_option("--model", cli.model_path, "Model JSON output path")
      ->capture_default_str();
  fit_cmd->add_option("--out", cli.out_path, "Forecasts CSV output path (default forecasts.csv)");
  fit_cmd->add_option("--cutoff", cli.cutoff, "Hide ledger rows at/after this month (YYYY-MM or index)");
  fit_cmd->add_option("--patterns", cli.patterns_path, "Cumulative pattern CSV output path");
  fit_cmd->add_option("--clusters", cli.clusters_path, "Cluster labels CSV output path");

  CLI::App* forecast_cmd =
      app.add_subcommand("forecast", "Complete the ledgers with a saved model");
  add_data_flags(forecast_cmd);
  forecast_cmd->add_option("--model", cli.model_path, "Model JSON to load")
      ->required();
  forecast_cmd->add_option("--cutoff", cli.cutoff,
                           "Hide ledger rows at/after this month (YYYY-MM or index)");
  forecast_cmd->add_option("--out", cli.out_path, "Forecasts CSV output path (default forecasts.csv)");
  forecast_cmd->add_option("--patterns", cli.patterns_path, "Cumulative pattern CSV output path");
  forecast_cmd->add_option("--clusters", cli.clusters_path, "Cluster labels CSV output path");

  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Score methods on a temporal split");
  add_data_flags(eval_cmd);
  add_fit_flags(eval_cmd);
  eval_cmd->add_option("--cutoff", cli.cutoff, "Test split start (YYYY-MM or index)")
      ->required();
  eval_cmd->add_option("--out", cli.out_path, "Report JSON output path (default report.json)");
  eval_cmd
      ->add_option("--methods", cli.methods, "Methods to score")
      ->delimiter(',')
      ->check(CLI::IsMember({"tsmc", "median", "knn"}))
      ->capture_default_str();
  eval_cmd->add_option("--knn-k", cli.knn_k, "Neighbours for the knn baseline")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic dataset");
  add_fit_flags(synth_cmd);
  synth_cmd->add_option("--horizon", cli.horizon, "Months per project (default 36)")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--projects", cli.projects, "Number of projects")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd
      ->add_option("--missing-rate", cli.missing_rate, "Expected missing fraction")
      ->check(CLI::Range(0.0, 0.999))
      ->capture_default_str();
  synth_cmd->add_option("--out-dir", cli.out_dir, "Output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(cli);
    if (forecast_cmd->parsed()) return cmd_forecast(cli);
    if (eval_cmd->parsed()) return cmd_evaluate(cli);
    if (synth_cmd->parsed()) return cmd_synth(cli);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
