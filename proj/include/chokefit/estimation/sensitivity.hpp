#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chokefit/estimation/objective.hpp"

namespace chokefit::estimation {

struct SensitivityOptions {
  double rank_tolerance = 1e-8;  // relative to the largest singular value
  // Physical columns are multiplied by their prior sigma before the SVD so
  // that units do not distort the rank. Network columns are left unscaled.
  bool scale_by_prior_sigma = true;
};

struct SensitivityReport {
  Eigen::MatrixXd jacobian;  // rows x parameters, unscaled d prediction / d phi
  std::vector<std::string> physical_columns;
  std::size_t network_columns = 0;
  Eigen::VectorXd column_scales;
  Eigen::VectorXd singular_values;  // of the scaled Jacobian, descending
  std::size_t numerical_rank = 0;
  double rank_tolerance = 0.0;
  bool identifiable = false;
  std::vector<std::size_t> excluded_rows;  // rows whose evaluation failed
};

/// Sensitivity matrix of predictions with respect to the model parameters
/// at `params`: the physical parameters of the mode followed, in HM mode, by
/// all network weights and biases in flatten() order.
SensitivityReport sensitivity_matrix(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup,
                                     const PriorSpec& priors, const SensitivityOptions& options = {});

}  // namespace chokefit::estimation
