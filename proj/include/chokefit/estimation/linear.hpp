#pragma once

// Closed-form least squares for the linear model y = X phi, used as an
// oracle for the iterative estimators.

#include <stdexcept>

#include <Eigen/Dense>

#include "chokefit/estimation/optimizer.hpp"

namespace chokefit::estimation {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (X^T X)^-1 X^T y. Throws SingularMatrixError when X^T X is rank deficient.
Eigen::VectorXd linear_mle_closed_form(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// (Pi + X^T X)^-1 (X^T y + Pi mu) for diagonal Pi given by `pi_diag`.
Eigen::VectorXd linear_map_closed_form(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& pi_diag, const Eigen::VectorXd& mu);

/// Mini-batch objective for the linear model:
/// weight * sum_batch (y - X phi)^2 + (phi - mu)^T Pi (phi - mu).
/// Pass an empty pi_diag for the unregularized problem.
BatchObjective linear_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& pi_diag = {}, const Eigen::VectorXd& mu = {});

}  // namespace chokefit::estimation
