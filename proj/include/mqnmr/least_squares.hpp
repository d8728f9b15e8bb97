#pragma once

#include <functional>

#include <Eigen/Dense>

namespace mqnmr {

struct LeastSquaresOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-13;  ///< relative parameter change that counts as converged
  double cost_tolerance = 1e-30;  ///< absolute cost below which iteration stops
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double cost = 0.0;  ///< 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Levenberg-Marquardt with Marquardt diagonal scaling and a central-difference Jacobian.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& residual, Eigen::VectorXd x0,
                                       const LeastSquaresOptions& options = {});

}  // namespace mqnmr
