#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mqnmr/sectors.hpp"

namespace mqnmr {

/// Eigenpairs of one sector block. Eigenvalues carry the coupling (units of D);
/// rows of the eigenvector matrix follow the sector's m_values.
struct SpectralDecomposition {
  SectorLabel label;
  double coupling = 1.0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::Index dimension() const { return eigenvalues.size(); }
};

/// Sector density-matrix block rho^S(t) in the M basis.
struct SectorState {
  SectorLabel label;
  Eigen::MatrixXcd matrix;
  double time = 0.0;  ///< dimensionless t = D tau
};

/// Throws NumericalError naming the sector if the eigensolver fails.
SpectralDecomposition diagonalize(const Sector& sector);

/// rho(0) = I_z restricted to the block: diag(m_values).
SectorState initial_state(const Sector& sector);

/// rho(t) = U e^{-i Lambda t / D} U^T rho(0) U e^{i Lambda t / D} U^T.
/// Throws ContractViolation when decomp and initial disagree on label or dimension.
SectorState propagate(const SpectralDecomposition& decomp, const SectorState& initial, double t);

/// Unnormalized coherence content of one sector, indexed by half-order p = k/2 >= 0:
/// value[p] = sum_i |rho_{i, i+p}|^2. Order sign convention: element (row, col)
/// has order k = M_row - M_col, so entries above the diagonal carry k > 0.
using OrderIntensities = std::vector<double>;

/// Repeated evaluation of one sector starting from rho(0) = I_z.
///
/// Works in the eigenbasis: rho~(t)_ab = R_ab exp(-i (w_a - w_b) t) with
/// R = V^T diag(M) V and w = lambda / D, then rotates back with V.
class SectorPropagator {
 public:
  SectorPropagator(const Sector& sector, SpectralDecomposition decomp);

  const SectorLabel& label() const { return decomp_.label; }
  const SpectralDecomposition& decomposition() const { return decomp_; }
  Eigen::Index dimension() const { return decomp_.dimension(); }

  Eigen::MatrixXcd state(double t) const;

  /// Writes dimension() half-order sums into out (out.size() >= dimension()), overwriting.
  void intensities(double t, std::span<double> out) const;

 private:
  SpectralDecomposition decomp_;
  Eigen::VectorXd frequencies_;
  Eigen::MatrixXd rotated_initial_;
};

}  // namespace mqnmr
