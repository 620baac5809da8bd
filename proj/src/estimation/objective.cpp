#include "chokefit/estimation/objective.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace chokefit::estimation {

using physics::Param;

PriorSpec PriorSpec::defaults() {
  PriorSpec p;
  p[Param::rho_o] = {800.0, 33.3};
  p[Param::rho_w] = {1025.0, 8.33};
  p[Param::kappa] = {1.32, 0.033};
  p[Param::m_g] = {0.027, 0.003};
  p[Param::p_rc] = {0.6, 0.067};
  p[Param::c_d] = {0.9, 0.25};
  return p;
}

void PriorSpec::validate() const {
  for (Param p : physics::kAllParams) {
    const Prior& pr = (*this)[p];
    if (!std::isfinite(pr.mu) || !(pr.sigma > 0.0) || !std::isfinite(pr.sigma)) {
      throw std::invalid_argument("priors." + std::string(physics::param_name(p)) +
                                  ": mu must be finite and sigma positive");
    }
  }
}

void RegularizationConfig::validate() const {
  if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps)) {
    throw std::invalid_argument("regularization.sigma_eps must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("regularization.lambda must be non-negative");
  }
}

double RegularizationConfig::physical_weight(const Prior& prior) const noexcept {
  if (!enabled) return 0.0;
  return (sigma_eps * sigma_eps) / (prior.sigma * prior.sigma);
}

namespace {

void add_data_term_mm(const data::Dataset& ds, std::span<const std::size_t> rows, double weight,
                      const ModelParams& params, const ModelSetup& setup, ObjectiveValue& out) {
  for (std::size_t i : rows) {
    const auto& row = ds.rows[i];
    const double a = physics::mechanistic_area(row.x.u, setup.area);
    const auto r = physics::oil_rate_with_gradient(row.x, params.physical, setup.consts, a);
    if (!r.ok) {
      ++out.failed_rows;
      out.data_loss += weight * kFailurePenalty;
      continue;
    }
    const double res = row.y - r.value;
    out.data_loss += weight * res * res;
    const double s = -2.0 * weight * res;
    for (std::size_t k = 0; k < physics::kNumParams; ++k) out.gradient.physical[k] += s * r.d_params[k];
  }
}

void add_data_term_hm(const data::Dataset& ds, std::span<const std::size_t> rows, double weight,
                      const ModelParams& params, const ModelSetup& setup, ObjectiveWorkspace& work,
                      ObjectiveValue& out) {
  work.inputs.resize(rows.size());
  work.d_area.assign(rows.size(), 0.0);
  for (std::size_t j = 0; j < rows.size(); ++j) work.inputs[j] = ds.rows[rows[j]].x.u;
  const Eigen::VectorXd& areas = work.evaluator.forward(work.inputs, *params.network);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& row = ds.rows[rows[j]];
    const auto r = physics::oil_rate_with_gradient(row.x, params.physical, setup.consts, areas[static_cast<Eigen::Index>(j)]);
    if (!r.ok) {
      ++out.failed_rows;
      out.data_loss += weight * kFailurePenalty;
      continue;
    }
    const double res = row.y - r.value;
    out.data_loss += weight * res * res;
    const double s = -2.0 * weight * res;
    for (std::size_t k = 0; k < physics::kNumParams; ++k) out.gradient.physical[k] += s * r.d_params[k];
    work.d_area[j] = s * r.d_area;
  }
  work.evaluator.backward(work.d_area, *params.network, *out.gradient.network);
}

}  // namespace

void evaluate_objective(const data::Dataset& ds, std::span<const std::size_t> rows, double weight,
                        const ModelParams& params, const ModelSetup& setup, const PriorSpec* priors,
                        const RegularizationConfig* reg, ObjectiveWorkspace& work, ObjectiveValue& out) {
  if (params.mode == ModelMode::hm && !params.network) {
    throw std::invalid_argument("hybrid model parameters have no network");
  }
  out.loss = out.data_loss = out.physical_penalty = out.network_penalty = 0.0;
  out.failed_rows = 0;
  if (params.network) {
    if (!out.gradient.network) out.gradient.network = nnet::MlpGradients::zeros_like(*params.network);
  } else {
    out.gradient.network.reset();
  }
  out.gradient.set_zero();

  if (params.mode == ModelMode::mm) {
    add_data_term_mm(ds, rows, weight, params, setup, out);
  } else {
    add_data_term_hm(ds, rows, weight, params, setup, work, out);
  }
  if (reg && reg->enabled) {
    if (!priors) throw std::invalid_argument("regularized objective requires priors");
    for (Param p : model_parameters(params.mode)) {
      const Prior& pr = (*priors)[p];
      const double w = reg->physical_weight(pr);
      const double d = params.physical.get(p) - pr.mu;
      out.physical_penalty += w * d * d;
      out.gradient.physical[physics::index(p)] += 2.0 * w * d;
    }
    const double lam = reg->network_weight();
    if (params.network && lam > 0.0) {
      out.network_penalty = lam * nnet::l2_norm_sq(*params.network);
      auto& g = *out.gradient.network;
      for (std::size_t l = 0; l < g.layers.size(); ++l) {
        g.layers[l].weight += 2.0 * lam * params.network->layers[l].weight;
        g.layers[l].bias += 2.0 * lam * params.network->layers[l].bias;
      }
    }
  }
  out.loss = out.data_loss + out.physical_penalty + out.network_penalty;
}

namespace {

std::vector<std::size_t> all_rows(const data::Dataset& ds) {
  if (ds.empty()) throw std::invalid_argument("objective requires a non-empty dataset");
  std::vector<std::size_t> rows(ds.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

ObjectiveValue mle_objective(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup) {
  const auto rows = all_rows(ds);
  ObjectiveWorkspace work;
  ObjectiveValue out;
  evaluate_objective(ds, rows, 1.0, params, setup, nullptr, nullptr, work, out);
  return out;
}

ObjectiveValue map_objective(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup,
                             const PriorSpec& priors, const RegularizationConfig& reg) {
  const auto rows = all_rows(ds);
  ObjectiveWorkspace work;
  ObjectiveValue out;
  evaluate_objective(ds, rows, 1.0, params, setup, &priors, &reg, work, out);
  return out;
}

}  // namespace chokefit::estimation
