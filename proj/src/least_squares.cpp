#include "mqnmr/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace mqnmr {

namespace {

Eigen::MatrixXd jacobian(const ResidualFunction& residual, const Eigen::VectorXd& x, Eigen::Index rows) {
  Eigen::MatrixXd jac(rows, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * std::max(std::fabs(x(j)), 1e-4);
    Eigen::VectorXd plus = x;
    Eigen::VectorXd minus = x;
    plus(j) += h;
    minus(j) -= h;
    jac.col(j) = (residual(plus) - residual(minus)) / (2.0 * h);
  }
  return jac;
}

double half_squared_norm(const Eigen::VectorXd& r) { return r.allFinite() ? 0.5 * r.squaredNorm() : INFINITY; }

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFunction& residual, Eigen::VectorXd x0,
                                       const LeastSquaresOptions& options) {
  LeastSquaresResult out;
  out.x = std::move(x0);
  Eigen::VectorXd r = residual(out.x);
  out.cost = half_squared_norm(r);
  double lambda = 1e-3;

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (out.cost <= options.cost_tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd jac = jacobian(residual, out.x, r.size());
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    const Eigen::VectorXd scaling = jtj.diagonal().cwiseMax(1e-300);

    bool improved = false;
    bool tiny_step = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * scaling;
      const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      const Eigen::VectorXd trial = out.x + step;
      const Eigen::VectorXd trial_r = residual(trial);
      const double trial_cost = half_squared_norm(trial_r);
      tiny_step = step.norm() <= options.step_tolerance * (out.x.norm() + options.step_tolerance);
      if (trial_cost < out.cost) {
        out.x = trial;
        r = trial_r;
        out.cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-15);
        improved = true;
        break;
      }
      if (tiny_step) break;
      lambda *= 4.0;
    }
    if (!improved || tiny_step) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace mqnmr
