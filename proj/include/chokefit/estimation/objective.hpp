#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "chokefit/estimation/model.hpp"

namespace chokefit::estimation {

struct Prior {
  double mu = 0.0;
  double sigma = 1.0;
};

struct PriorSpec {
  std::array<Prior, physics::kNumParams> priors;

  /// Prior means and standard deviations of the synthetic study.
  static PriorSpec defaults();
  [[nodiscard]] const Prior& operator[](physics::Param p) const { return priors[physics::index(p)]; }
  [[nodiscard]] Prior& operator[](physics::Param p) { return priors[physics::index(p)]; }
  void validate() const;
};

/// Physical penalty weights are sigma_eps^2 / sigma_i^2; network weights are
/// penalized by lambda * ||w||^2. Disabled means both terms are exactly zero.
struct RegularizationConfig {
  double sigma_eps = 10.0;  // [m3/h]
  double lambda = 1e-4;
  bool enabled = true;

  void validate() const;
  [[nodiscard]] double physical_weight(const Prior& prior) const noexcept;
  [[nodiscard]] double network_weight() const noexcept { return enabled ? lambda : 0.0; }
};

/// Loss contribution of a row whose flow equation cannot be evaluated.
inline constexpr double kFailurePenalty = 1e6;

struct ObjectiveValue {
  double loss = 0.0;
  double data_loss = 0.0;
  double physical_penalty = 0.0;
  double network_penalty = 0.0;
  std::size_t failed_rows = 0;
  ModelGradient gradient;  // d loss / d parameters, physical units
};

/// Reusable scratch buffers for repeated objective evaluations.
struct ObjectiveWorkspace {
  nnet::BatchEvaluator evaluator;
  std::vector<double> inputs;
  std::vector<double> d_area;
};

/// weight * sum over `rows` of squared residuals (failing rows add the fixed
/// penalty), plus the regularization terms when `priors`/`reg` are given.
/// Gradients are accumulated into out.gradient after it is zeroed.
void evaluate_objective(const data::Dataset& ds, std::span<const std::size_t> rows, double weight,
                        const ModelParams& params, const ModelSetup& setup, const PriorSpec* priors,
                        const RegularizationConfig* reg, ObjectiveWorkspace& work, ObjectiveValue& out);

/// Sum of squared residuals over the dataset and its gradient.
ObjectiveValue mle_objective(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup);

/// MLE term plus the prior penalty on physical parameters and weight decay
/// on network parameters.
ObjectiveValue map_objective(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup,
                             const PriorSpec& priors, const RegularizationConfig& reg);

}  // namespace chokefit::estimation
