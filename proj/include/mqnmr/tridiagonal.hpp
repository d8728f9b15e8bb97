#pragma once

#include <span>

#include <Eigen/Dense>

namespace mqnmr {

struct TridiagonalEigen {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< column i belongs to values[i]
};

/// Implicit QL with Wilkinson-style shifts (tql2) for a real symmetric
/// tridiagonal matrix. off_diagonal[i] couples rows i and i+1.
///
/// Each eigenvector is normalized so that its largest-magnitude component is
/// positive; near-ties (relative 1e-10) go to the lowest row index.
/// Throws NumericalError when an eigenvalue needs more than max_iterations sweeps.
TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diagonal, std::span<const double> off_diagonal,
                                             int max_iterations = 60);

/// Flip column signs in place to the convention above.
void canonicalize_signs(Eigen::MatrixXd& vectors);

}  // namespace mqnmr
