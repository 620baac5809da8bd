#include "chokefit/estimation/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chokefit::estimation {

namespace {

Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) return Eigen::VectorXd();
  if (a.cols() <= a.rows()) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues();
  }
  // Wide matrix: the nonzero singular values are the square roots of the
  // eigenvalues of the small Gram matrix A A^T.
  const Eigen::MatrixXd gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = eig.eigenvalues().reverse();
  return ev.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

SensitivityReport sensitivity_matrix(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup,
                                     const PriorSpec& priors, const SensitivityOptions& options) {
  params.check_consistent();
  if (!(options.rank_tolerance > 0.0)) throw std::invalid_argument("rank tolerance must be positive");
  const auto phys = model_parameters(params.mode);
  const auto n_phys = static_cast<Eigen::Index>(phys.size());
  const Eigen::Index n_net = params.network ? static_cast<Eigen::Index>(params.network->num_parameters()) : 0;

  SensitivityReport rep;
  rep.rank_tolerance = options.rank_tolerance;
  rep.network_columns = static_cast<std::size_t>(n_net);
  for (auto p : phys) rep.physical_columns.emplace_back(physics::param_name(p));

  std::vector<Eigen::VectorXd> rows;
  rows.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& x = ds.rows[i].x;
    Eigen::VectorXd row(n_phys + n_net);
    double area = 0.0;
    std::optional<nnet::MlpGradients> net_grad;
    try {
      if (params.network) {
        auto [a, g] = nnet::forward_with_gradients(x.u, *params.network);
        area = a;
        net_grad = std::move(g);
      } else {
        area = physics::mechanistic_area(x.u, setup.area);
      }
    } catch (const nnet::EvaluationError&) {
      rep.excluded_rows.push_back(i);
      continue;
    }
    const auto r = physics::oil_rate_with_gradient(x, params.physical, setup.consts, area);
    if (!r.ok) {
      rep.excluded_rows.push_back(i);
      continue;
    }
    for (Eigen::Index k = 0; k < n_phys; ++k) row[k] = r.d_params[physics::index(phys[static_cast<std::size_t>(k)])];
    if (net_grad) row.tail(n_net) = r.d_area * nnet::flatten(*net_grad);
    rows.push_back(std::move(row));
  }

  rep.jacobian.resize(static_cast<Eigen::Index>(rows.size()), n_phys + n_net);
  for (std::size_t i = 0; i < rows.size(); ++i) rep.jacobian.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();

  rep.column_scales = Eigen::VectorXd::Ones(n_phys + n_net);
  if (options.scale_by_prior_sigma) {
    for (Eigen::Index k = 0; k < n_phys; ++k) rep.column_scales[k] = priors[phys[static_cast<std::size_t>(k)]].sigma;
  }
  const Eigen::MatrixXd scaled = rep.jacobian * rep.column_scales.asDiagonal();
  rep.singular_values = singular_values_of(scaled);

  const double largest = rep.singular_values.size() ? rep.singular_values[0] : 0.0;
  if (largest > 0.0) {
    const double cut = options.rank_tolerance * largest;
    rep.numerical_rank = static_cast<std::size_t>((rep.singular_values.array() > cut).count());
  }
  rep.identifiable = rep.numerical_rank == static_cast<std::size_t>(n_phys + n_net);
  return rep;
}

}  // namespace chokefit::estimation
