#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chokefit/data/dataset.hpp"
#include "chokefit/estimation/metrics.hpp"
#include "chokefit/estimation/objective.hpp"
#include "chokefit/estimation/optimizer.hpp"

namespace chokefit::estimation {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer coordinates for physical parameters. prior_mean uses
/// phi = mu * (1 + theta), prior_sigma uses phi = mu + sigma * theta.
enum class ParamScaling { prior_mean, prior_sigma };

std::string_view scaling_name(ParamScaling s) noexcept;
std::optional<ParamScaling> scaling_from_name(std::string_view s) noexcept;

struct FitConfig {
  ModelMode mode = ModelMode::mm;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 1e-3;
  LrSchedule lr_schedule = LrSchedule::cosine;
  double lr_final_fraction = 0.01;
  std::size_t batch_size = 32;
  std::size_t epochs = 2000;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  std::map<physics::Param, double> fixed_params;
  ParamScaling scaling = ParamScaling::prior_mean;
  std::size_t threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  [[nodiscard]] bool is_fixed(physics::Param p) const { return fixed_params.count(p) != 0; }
};

enum class RestartStatus { ok, diverged, aborted, evaluation_failed };
std::string_view status_name(RestartStatus s) noexcept;
std::optional<RestartStatus> status_from_name(std::string_view s) noexcept;

struct RestartRecord {
  std::size_t index = 0;
  RestartStatus status = RestartStatus::ok;
  std::string message;
  ModelParams initial;
  ModelParams final_params;
  std::vector<double> loss_trace;
  std::size_t rejected_steps = 0;
  Metrics test;
};

struct SummaryStat {
  std::string name;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

/// Statistics over successful restarts: mae, mape, then each physical
/// parameter of the mode.
struct FitSummary {
  std::size_t successful_restarts = 0;
  std::vector<SummaryStat> stats;

  [[nodiscard]] const SummaryStat& at(std::string_view name) const;
};

struct FitResult {
  ModelSetup setup;
  FitConfig config;
  PriorSpec priors;
  RegularizationConfig regularization;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<RestartRecord> restarts;
  FitSummary summary;
};

FitSummary summarize(const std::vector<RestartRecord>& restarts, ModelMode mode);

/// Initial parameters of restart `r`: physical draws from the priors
/// truncated to feasible values, He-initialized network in HM mode.
ModelParams initial_params(const ModelSetup& setup, const PriorSpec& priors, const FitConfig& fit, std::size_t r);

/// Multi-restart mini-batch fit. Throws TrainingError when no restart
/// finishes successfully.
FitResult train(const data::Dataset& train_set, const data::Dataset& test_set, const ModelSetup& setup,
                const PriorSpec& priors, const RegularizationConfig& reg, const FitConfig& fit);

/// Test metrics of a parameter set. Predictions that fail to evaluate throw.
Metrics evaluate(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup);

}  // namespace chokefit::estimation
