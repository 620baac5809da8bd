#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace chokefit::estimation {

enum class OptimizerKind { adam, sgd };
enum class LrSchedule { constant, cosine };

std::string_view optimizer_name(OptimizerKind k) noexcept;
std::optional<OptimizerKind> optimizer_from_name(std::string_view s) noexcept;
std::string_view schedule_name(LrSchedule s) noexcept;
std::optional<LrSchedule> schedule_from_name(std::string_view s) noexcept;

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long long t = 0;

  static AdamState zeros(Eigen::Index n);
};

/// Bias-corrected Adam update in place. Returns false, leaving params and
/// state untouched, when the gradient has non-finite entries.
bool adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad,
               AdamState& state, double alpha, const AdamConfig& cfg = {});

/// params -= alpha * grad. Same rejection rule as adam_step.
bool sgd_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad, double alpha);

/// Learning rate for a 0-based epoch. Cosine decays from alpha to
/// alpha * final_fraction over the run.
double scheduled_rate(double alpha, LrSchedule schedule, double final_fraction, std::size_t epoch,
                      std::size_t epochs) noexcept;

struct MinibatchOptions {
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 1e-3;
  LrSchedule schedule = LrSchedule::cosine;
  double lr_final_fraction = 0.01;
  std::size_t batch_size = 32;
  std::size_t epochs = 2000;
  AdamConfig adam;
  // A run is aborted when more than failure_fraction of the rows fail to
  // evaluate for failure_patience consecutive epochs.
  double failure_fraction = 0.5;
  std::size_t failure_patience = 10;
};

struct BatchEvaluation {
  double loss = 0.0;
  std::size_t failed_rows = 0;
};

/// Evaluates the mini-batch estimate of the full objective at theta: `weight`
/// scales the data term (n / batch size) and `grad` receives its gradient.
using BatchObjective = std::function<BatchEvaluation(std::span<const std::size_t> rows, double weight,
                                                     const Eigen::VectorXd& theta, Eigen::VectorXd& grad)>;

struct MinimizeResult {
  Eigen::VectorXd theta;
  std::vector<double> loss_trace;  // mean batch loss per epoch
  std::size_t rejected_steps = 0;
  bool diverged = false;
  bool aborted = false;
  std::string message;
};

/// Shuffled mini-batch descent. Entries with a zero in `update_mask` are
/// never changed.
MinimizeResult minimize_minibatch(std::size_t n_rows, const BatchObjective& objective, Eigen::VectorXd theta,
                                  const Eigen::VectorXd& update_mask, const MinibatchOptions& options,
                                  std::mt19937_64& shuffle_rng);

}  // namespace chokefit::estimation
