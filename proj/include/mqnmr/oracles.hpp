#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "mqnmr/coherence.hpp"
#include "mqnmr/sectors.hpp"

namespace mqnmr {

/// Independent references for the sector pipeline: closed forms for N = 2 and
/// N = 5, and a dense propagator in the product (multiplicative) basis.

/// Largest N the dense oracle accepts.
inline constexpr int kDenseSpinCap = 12;

/// Five spins, D = 1: J_0, J_{+-2}, J_{+-4} from the exact solution.
CoherenceSpectrum five_spin_closed_form(double t);

/// Two spins, D = 1. Only the S = 1 block {M = 1, -1} evolves, under -sigma_x / 2
/// acting on sigma_z, so rho = cos t sigma_z + sin t sigma_y and with Tr(I_z^2) = 2:
///   J_0 = cos^2 t,  J_{+-2} = sin^2(t) / 2.
CoherenceSpectrum two_spin_closed_form(double t);

/// Eigenvalues and the S = 5/2 density-matrix entries of the five-spin solution.
/// rho^{5/2} = [[a11, i a12, a13], [-i a12, a22, i a23], [a13, -i a23, a33]] in the
/// basis M = {5/2, 1/2, -3/2}; rho^{3/2} in M = {3/2, -1/2}.
struct FiveSpinSectorData {
  std::array<double, 3> eigenvalues_5_2;  ///< ascending
  std::array<double, 2> eigenvalues_3_2;
  double eigenvalue_1_2;

  static double a11(double t);
  static double a12(double t);
  static double a13(double t);
  static double a22(double t);
  static double a23(double t);
  static double a33(double t);

  static Eigen::Matrix3cd rho_5_2(double t);
  static Eigen::Matrix2cd rho_3_2(double t);
};

FiveSpinSectorData five_spin_sector_data();

/// Collective operators I+, I-, I_z on 2^N product states. Bit j of a basis
/// index set means spin j points down.
struct DenseOperators {
  int n_spins = 0;
  Eigen::MatrixXd raising;
  Eigen::MatrixXd lowering;
  Eigen::MatrixXd iz;
  std::vector<int> twice_magnetization;  ///< 2M of each basis state
};

/// Throws DomainError for N < 1 or N > kDenseSpinCap.
DenseOperators collective_operators(int n_spins);

struct DenseState {
  Eigen::MatrixXcd matrix;
  std::vector<int> twice_magnetization;
};

/// Brute-force evolution of rho(0) = I_z under -(1/4)((I+)^2 + (I-)^2) in
/// dimensionless time, diagonalized once with a general dense symmetric solver.
class DenseOracle {
 public:
  /// Throws DomainError for N > kDenseSpinCap.
  explicit DenseOracle(const SpinSystem& system);

  const SpinSystem& system() const { return system_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  DenseState state(double t) const;
  CoherenceSpectrum spectrum(double t) const;

 private:
  SpinSystem system_;
  std::vector<int> twice_magnetization_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::MatrixXd rotated_initial_;
};

/// J_k by grouping elements of rho by magnetization difference.
CoherenceSpectrum dense_spectrum(const DenseState& state, int n_spins, double t);

CoherenceSpectrum dense_brute_force(const SpinSystem& system, double t);

}  // namespace mqnmr

namespace mqnmr {

/// Sum of |rho_ij|^2 over pairs with odd magnetization difference.
double dense_odd_order_content(const DenseState& state);

}  // namespace mqnmr
