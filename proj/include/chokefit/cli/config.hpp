#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chokefit/data/csv_io.hpp"
#include "chokefit/data/preprocessing.hpp"
#include "chokefit/data/synthetic.hpp"
#include "chokefit/estimation/search.hpp"
#include "chokefit/estimation/train.hpp"
#include "json.hpp"

namespace chokefit::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  // Settings ordered from strongest to weakest regularization. When
  // sigma_eps is empty, lambda is swept at the configured sigma_eps instead.
  std::vector<double> sigma_eps{10.0, 1.0, 0.1};
  std::vector<double> lambda;
  double reference_c_d = 1.0;  // reference curve is reference_c_d * A_mech(u)
  std::size_t grid_points = 101;
};

struct SearchConfig {
  estimation::SearchSpace space;
  std::size_t budget = 20;
  std::size_t restarts = 2;         // per trial
  double validation_fraction = 0.2;  // tail of the training split
};

/// Everything a command needs. The top-level seed overrides the seeds of
/// the synthetic generator and the fit.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "runs";
  data::SyntheticConfig synthetic;
  estimation::ModelSetup model;
  estimation::PriorSpec priors = estimation::PriorSpec::defaults();
  estimation::RegularizationConfig regularization;
  estimation::FitConfig fit;
  data::SchemaConfig schema;
  data::FilterOptions filter;
  data::SplitSpec split{0.2, std::nullopt, std::nullopt};
  SweepConfig sweep;
  SearchConfig search;

  /// Propagates the seed and shared constants, then validates every part.
  /// Throws ConfigError.
  void resolve();
};

/// Strict parse: unknown keys or bad types throw ConfigError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace chokefit::cli
