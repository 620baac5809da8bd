#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chokefit/cli/config.hpp"

namespace chokefit::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitTraining = 4,
  kExitUsage = 64,
};

/// Creates `<output_dir>/<command>-<UTC time>[-n]`, or uses output_dir
/// directly when `timestamped` is false.
std::filesystem::path make_run_dir(const std::filesystem::path& output_dir, const std::string& command,
                                   bool timestamped);

struct GenerateOutcome {
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  data::Dataset train;
  data::Dataset test;
};

/// Writes train.csv (n_points rows), test.csv (n_test_points rows) and
/// summary.json. The generating area is synthetic.area; a non-quadratic
/// shape gives structurally mismatched data.
GenerateOutcome cmd_generate(const RunConfig& cfg, const std::filesystem::path& run_dir, std::ostream& log);

struct PreparedData {
  data::Dataset train;
  data::Dataset test;
  data::FilterReport train_report;
  std::optional<data::FilterReport> test_report;
  std::size_t row_issues = 0;
};

/// Loads and filters the dataset. With a separate test file the whole
/// dataset trains; otherwise the configured chronological split applies.
PreparedData prepare_data(const RunConfig& cfg, const std::filesystem::path& data_path,
                          const std::optional<std::filesystem::path>& test_path);

struct FitOutcome {
  std::filesystem::path result_path;
  estimation::FitResult result;
  std::string table;
};

/// Console table with min/median/max per metric and parameter.
std::string summary_table(const estimation::FitResult& result);

FitOutcome cmd_fit(const RunConfig& cfg, const std::filesystem::path& data_path,
                   const std::optional<std::filesystem::path>& test_path, const std::filesystem::path& run_dir,
                   std::ostream& log);

struct EvaluateRow {
  std::size_t restart = 0;
  estimation::Metrics metrics;
  estimation::Metrics stored;
};

struct EvaluateOutcome {
  std::vector<EvaluateRow> rows;  // successful restarts only
  double median_mae = 0.0;
  double median_mape = 0.0;
};

EvaluateOutcome cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& result_path,
                             const std::filesystem::path& data_path, const std::filesystem::path& run_dir,
                             std::ostream& log);

struct SweepSetting {
  double sigma_eps = 0.0;
  double lambda = 0.0;
  bool regularized = true;
  estimation::FitResult result;
  std::vector<double> u;
  std::vector<double> learned;    // pointwise median over successful restarts
  std::vector<double> reference;  // reference_c_d * A_mech(u)
  double max_deviation = 0.0;
};

struct SweepOutcome {
  std::vector<SweepSetting> settings;
};

/// Grid u_k = k / (points - 1), k = 0 .. points - 1.
std::vector<double> unit_grid(std::size_t points);

/// Trains the hybrid model per sweep setting and writes area_curves.csv
/// and deviations.csv.
SweepOutcome cmd_sweep(const RunConfig& cfg, const std::filesystem::path& data_path,
                       const std::optional<std::filesystem::path>& test_path, const std::filesystem::path& run_dir,
                       std::ostream& log);

/// Splits the training rows into train/validation and runs the random
/// search. Writes trials.csv and best.json.
estimation::SearchResult cmd_search(const RunConfig& cfg, const std::filesystem::path& data_path,
                                    const std::filesystem::path& run_dir, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chokefit::cli
