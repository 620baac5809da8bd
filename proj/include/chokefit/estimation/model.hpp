#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "chokefit/data/dataset.hpp"
#include "chokefit/nnet.hpp"
#include "chokefit/physics.hpp"

namespace chokefit::estimation {

enum class ModelMode {
  mm,  // mechanistic: quadratic area curve, six physical parameters
  hm,  // hybrid: network area with C_D absorbed, five physical parameters
};

std::string_view mode_name(ModelMode m) noexcept;
std::optional<ModelMode> mode_from_name(std::string_view name) noexcept;

struct NetworkSpec {
  std::vector<std::size_t> sizes = nnet::default_sizes();
  double output_scale = 1e-2;  // [m2]
};

/// Known constants and structural choices shared by every fit.
struct ModelSetup {
  physics::FluidConstants consts;
  physics::AreaSpec area;  // mechanistic area curve
  NetworkSpec network;
};

struct ModelParams {
  ModelMode mode = ModelMode::mm;
  physics::PhysicalParams physical;
  std::optional<nnet::MlpParams> network;  // present iff mode == hm

  /// Throws std::invalid_argument if mode and network presence disagree.
  void check_consistent() const;
};

struct ModelGradient {
  physics::ParamVector physical{};
  std::optional<nnet::MlpGradients> network;

  static ModelGradient zeros_like(const ModelParams& params);
  void set_zero();
};

/// Physical parameters estimated in the given mode.
std::vector<physics::Param> model_parameters(ModelMode mode);

/// Flow area entering the flow equation: mechanistic curve (MM) or network
/// output (HM). For the MM this excludes C_D.
double model_area(double u, const ModelParams& params, const ModelSetup& setup);

/// Throws physics::EvaluationError / nnet::EvaluationError on failure.
double predict(const physics::ChokeInput& x, const ModelParams& params, const ModelSetup& setup);
std::vector<double> predict(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup);

}  // namespace chokefit::estimation
