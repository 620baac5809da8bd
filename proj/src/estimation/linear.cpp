#include "chokefit/estimation/linear.hpp"

#include <stdexcept>

namespace chokefit::estimation {

namespace {

Eigen::VectorXd solve_checked(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw SingularMatrixError(std::string(what) + ": matrix is singular");
  return lu.solve(b);
}

}  // namespace

Eigen::VectorXd linear_mle_closed_form(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw std::invalid_argument("linear_mle: X and y disagree in rows");
  return solve_checked(X.transpose() * X, X.transpose() * y, "linear_mle");
}

Eigen::VectorXd linear_map_closed_form(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& pi_diag, const Eigen::VectorXd& mu) {
  if (X.rows() != y.size()) throw std::invalid_argument("linear_map: X and y disagree in rows");
  if (pi_diag.size() != X.cols() || mu.size() != X.cols()) {
    throw std::invalid_argument("linear_map: prior has wrong dimension");
  }
  if ((pi_diag.array() < 0.0).any()) throw std::invalid_argument("linear_map: negative prior weight");
  Eigen::MatrixXd a = X.transpose() * X;
  a.diagonal() += pi_diag;
  return solve_checked(a, X.transpose() * y + pi_diag.cwiseProduct(mu), "linear_map");
}

BatchObjective linear_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& pi_diag,
                                const Eigen::VectorXd& mu) {
  if (X.rows() != y.size()) throw std::invalid_argument("linear_objective: X and y disagree in rows");
  const bool prior = pi_diag.size() > 0;
  if (prior && (pi_diag.size() != X.cols() || mu.size() != X.cols())) {
    throw std::invalid_argument("linear_objective: prior has wrong dimension");
  }
  return [X, y, pi_diag, mu, prior](std::span<const std::size_t> rows, double weight, const Eigen::VectorXd& theta,
                                    Eigen::VectorXd& grad) {
    double loss = 0.0;
    for (std::size_t i : rows) {
      const auto r = static_cast<Eigen::Index>(i);
      const double res = y[r] - X.row(r).dot(theta);
      loss += weight * res * res;
      grad -= 2.0 * weight * res * X.row(r).transpose();
    }
    if (prior) {
      const Eigen::VectorXd d = theta - mu;
      loss += d.dot(pi_diag.cwiseProduct(d));
      grad += 2.0 * pi_diag.cwiseProduct(d);
    }
    return BatchEvaluation{loss, 0};
  };
}

}  // namespace chokefit::estimation
