#include "chokefit/estimation/model.hpp"

#include <stdexcept>

namespace chokefit::estimation {

std::string_view mode_name(ModelMode m) noexcept { return m == ModelMode::mm ? "mm" : "hm"; }

std::optional<ModelMode> mode_from_name(std::string_view name) noexcept {
  if (name == "mm") return ModelMode::mm;
  if (name == "hm") return ModelMode::hm;
  return std::nullopt;
}

void ModelParams::check_consistent() const {
  if ((mode == ModelMode::hm) != network.has_value()) {
    throw std::invalid_argument("model parameters: network must be present exactly in hm mode");
  }
  if ((mode == ModelMode::hm) != physical.c_d_absorbed) {
    throw std::invalid_argument("model parameters: c_d is absorbed exactly in hm mode");
  }
}

ModelGradient ModelGradient::zeros_like(const ModelParams& params) {
  ModelGradient g;
  if (params.network) g.network = nnet::MlpGradients::zeros_like(*params.network);
  return g;
}

void ModelGradient::set_zero() {
  physical.fill(0.0);
  if (network) network->set_zero();
}

std::vector<physics::Param> model_parameters(ModelMode mode) {
  using physics::Param;
  std::vector<Param> out{Param::rho_o, Param::rho_w, Param::kappa, Param::m_g, Param::p_rc};
  if (mode == ModelMode::mm) out.push_back(Param::c_d);
  return out;
}

double model_area(double u, const ModelParams& params, const ModelSetup& setup) {
  if (params.mode == ModelMode::hm) return nnet::forward(u, *params.network);
  return physics::mechanistic_area(u, setup.area);
}

double predict(const physics::ChokeInput& x, const ModelParams& params, const ModelSetup& setup) {
  if (params.mode == ModelMode::mm) return physics::mm_predict(x, params.physical, setup.consts, setup.area);
  const double a = nnet::forward(x.u, *params.network);
  const auto q = physics::try_oil_rate(x, params.physical, setup.consts, a);
  if (!q) throw physics::EvaluationError("flow equation infeasible", x, params.physical);
  return *q;
}

std::vector<double> predict(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup) {
  params.check_consistent();
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& row : ds.rows) out.push_back(predict(row.x, params, setup));
  return out;
}

}  // namespace chokefit::estimation
