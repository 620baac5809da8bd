#include "chokefit/estimation/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace chokefit::estimation {

std::string_view optimizer_name(OptimizerKind k) noexcept { return k == OptimizerKind::adam ? "adam" : "sgd"; }

std::optional<OptimizerKind> optimizer_from_name(std::string_view s) noexcept {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd") return OptimizerKind::sgd;
  return std::nullopt;
}

std::string_view schedule_name(LrSchedule s) noexcept { return s == LrSchedule::constant ? "constant" : "cosine"; }

std::optional<LrSchedule> schedule_from_name(std::string_view s) noexcept {
  if (s == "constant") return LrSchedule::constant;
  if (s == "cosine") return LrSchedule::cosine;
  return std::nullopt;
}

AdamState AdamState::zeros(Eigen::Index n) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  return s;
}

bool adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad,
               AdamState& state, double alpha, const AdamConfig& cfg) {
  if (state.m.size() != params.size() || state.v.size() != params.size() || grad.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  if (!grad.allFinite()) return false;
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  params.array() -= alpha * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.epsilon);
  return true;
}

bool sgd_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad, double alpha) {
  if (grad.size() != params.size()) throw std::invalid_argument("sgd_step: shape mismatch");
  if (!grad.allFinite()) return false;
  params -= alpha * grad;
  return true;
}

double scheduled_rate(double alpha, LrSchedule schedule, double final_fraction, std::size_t epoch,
                      std::size_t epochs) noexcept {
  if (schedule == LrSchedule::constant || epochs == 0) return alpha;
  const double progress = static_cast<double>(epoch) / static_cast<double>(epochs);
  const double cosine = 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
  return alpha * (final_fraction + (1.0 - final_fraction) * cosine);
}

namespace {

// Late in training, Adam moments and ReLU gradients drift into subnormal
// range, which is very slow on x86. Flush them to zero for the duration of a
// minimization and restore the caller's mode afterwards.
class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

}  // namespace

MinimizeResult minimize_minibatch(std::size_t n_rows, const BatchObjective& objective, Eigen::VectorXd theta,
                                  const Eigen::VectorXd& update_mask, const MinibatchOptions& options,
                                  std::mt19937_64& shuffle_rng) {
  if (n_rows == 0) throw std::invalid_argument("minimize: no rows");
  if (options.batch_size == 0) throw std::invalid_argument("minimize: batch size must be positive");
  if (update_mask.size() != theta.size()) throw std::invalid_argument("minimize: mask shape mismatch");

  const FlushDenormals ftz;
  MinimizeResult res;
  res.loss_trace.reserve(options.epochs);
  AdamState state = AdamState::zeros(theta.size());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t failing_epochs = 0;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const double alpha = scheduled_rate(options.learning_rate, options.schedule, options.lr_final_fraction,
                                        epoch, options.epochs);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    std::size_t failed = 0;
    for (std::size_t start = 0; start < n_rows; start += options.batch_size) {
      const std::size_t len = std::min(options.batch_size, n_rows - start);
      const std::span<const std::size_t> rows(order.data() + start, len);
      const double weight = static_cast<double>(n_rows) / static_cast<double>(len);
      grad.setZero();
      const BatchEvaluation ev = objective(rows, weight, theta, grad);
      if (!std::isfinite(ev.loss)) {
        res.diverged = true;
        res.message = "non-finite loss at epoch " + std::to_string(epoch);
        res.theta = std::move(theta);
        return res;
      }
      loss_sum += ev.loss;
      ++batches;
      failed += ev.failed_rows;
      grad.array() *= update_mask.array();
      const bool accepted = options.optimizer == OptimizerKind::adam
                                ? adam_step(theta, grad, state, alpha, options.adam)
                                : sgd_step(theta, grad, alpha);
      if (!accepted) ++res.rejected_steps;
    }
    res.loss_trace.push_back(loss_sum / static_cast<double>(batches));
    if (static_cast<double>(failed) > options.failure_fraction * static_cast<double>(n_rows)) {
      if (++failing_epochs >= options.failure_patience) {
        res.aborted = true;
        res.message = "more than half of the rows failed to evaluate for " +
                      std::to_string(options.failure_patience) + " consecutive epochs";
        break;
      }
    } else {
      failing_epochs = 0;
    }
  }
  if (!theta.allFinite()) {
    res.diverged = true;
    res.message = "non-finite parameters";
  }
  res.theta = std::move(theta);
  return res;
}

}  // namespace chokefit::estimation
