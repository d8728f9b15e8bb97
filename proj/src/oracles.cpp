#include "mqnmr/oracles.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "mqnmr/errors.hpp"

namespace mqnmr {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt7 = std::sqrt(7.0);

}  // namespace

CoherenceSpectrum five_spin_closed_form(double t) {
  const double w3 = kSqrt3 * t;
  const double w7 = kSqrt7 * t;
  CoherenceSpectrum out;
  out.time = t;
  const double j0 = (27825.0 + 9604.0 * std::cos(2.0 * w3) + 2520.0 * std::cos(w7) + 7560.0 * std::cos(2.0 * w7) +
                     360.0 * std::cos(3.0 * w7) + 151.0 * std::cos(4.0 * w7)) /
                    48020.0;
  const double j2 = (95.0 - 49.0 * std::cos(2.0 * w3) - 45.0 * std::cos(2.0 * w7) - std::cos(4.0 * w7)) / 490.0;
  const double j4 = 144.0 / 2401.0 * std::pow(std::sin(w7 / 2.0), 8);
  out.intensities = {j0, j2, j4};
  return out;
}

CoherenceSpectrum two_spin_closed_form(double t) {
  CoherenceSpectrum out;
  out.time = t;
  const double c = std::cos(t);
  const double s = std::sin(t);
  out.intensities = {c * c, 0.5 * s * s};
  return out;
}

double FiveSpinSectorData::a11(double t) {
  const double w = kSqrt7 * t;
  return 5.0 / 98.0 * (36.0 * std::cos(w) - 2.0 * std::cos(2.0 * w) + 15.0);
}

double FiveSpinSectorData::a12(double t) {
  const double w = kSqrt7 * t;
  return 1.0 / 7.0 * std::sqrt(10.0 / 7.0) * (2.0 * std::cos(w) - 9.0) * std::sin(w);
}

double FiveSpinSectorData::a13(double t) {
  return -24.0 / 49.0 * std::sqrt(5.0) * std::pow(std::sin(kSqrt7 * t / 2.0), 4);
}

double FiveSpinSectorData::a22(double t) { return (4.0 * std::cos(2.0 * kSqrt7 * t) + 3.0) / 14.0; }

double FiveSpinSectorData::a23(double t) {
  const double w = kSqrt7 * t;
  return -3.0 / 7.0 * std::sqrt(2.0 / 7.0) * (2.0 * std::cos(w) + 5.0) * std::sin(w);
}

double FiveSpinSectorData::a33(double t) {
  const double w = kSqrt7 * t;
  return -3.0 / 98.0 * (60.0 * std::cos(w) + 6.0 * std::cos(2.0 * w) - 17.0);
}

Eigen::Matrix3cd FiveSpinSectorData::rho_5_2(double t) {
  const std::complex<double> i(0.0, 1.0);
  Eigen::Matrix3cd m;
  m << a11(t), i * a12(t), a13(t),  //
      -i * a12(t), a22(t), i * a23(t),  //
      a13(t), -i * a23(t), a33(t);
  return m;
}

Eigen::Matrix2cd FiveSpinSectorData::rho_3_2(double t) {
  const std::complex<double> i(0.0, 1.0);
  const double c = std::cos(kSqrt3 * t);
  const double s = std::sin(kSqrt3 * t);
  Eigen::Matrix2cd m;
  m << c + 0.5, -i * s,  //
      i * s, 0.5 - c;
  return m;
}

FiveSpinSectorData five_spin_sector_data() {
  return FiveSpinSectorData{{-kSqrt7, 0.0, kSqrt7}, {-kSqrt3 / 2.0, kSqrt3 / 2.0}, 0.0};
}

DenseOperators collective_operators(int n_spins) {
  if (n_spins < 1 || n_spins > kDenseSpinCap) {
    throw DomainError("dense oracle supports 1 <= N <= " + std::to_string(kDenseSpinCap) + ", got " +
                      std::to_string(n_spins));
  }
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  DenseOperators ops;
  ops.n_spins = n_spins;
  ops.raising = Eigen::MatrixXd::Zero(dim, dim);
  ops.iz = Eigen::MatrixXd::Zero(dim, dim);
  ops.twice_magnetization.resize(static_cast<std::size_t>(dim));
  for (Eigen::Index b = 0; b < dim; ++b) {
    int twice_m = 0;
    for (int j = 0; j < n_spins; ++j) {
      const Eigen::Index bit = Eigen::Index{1} << j;
      if (b & bit) {
        twice_m -= 1;
        ops.raising(b ^ bit, b) = 1.0;  // I_j^+ flips a down spin up
      } else {
        twice_m += 1;
      }
    }
    ops.twice_magnetization[static_cast<std::size_t>(b)] = twice_m;
    ops.iz(b, b) = 0.5 * twice_m;
  }
  ops.lowering = ops.raising.transpose();
  return ops;
}

DenseOracle::DenseOracle(const SpinSystem& system) : system_(system) {
  const auto ops = collective_operators(system.n_spins);
  twice_magnetization_ = ops.twice_magnetization;
  const Eigen::MatrixXd up2 = ops.raising * ops.raising;
  const Eigen::MatrixXd hamiltonian = -0.25 * (up2 + up2.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) throw NumericalError("dense oracle: eigensolver failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  rotated_initial_ = eigenvectors_.transpose() * ops.iz * eigenvectors_;
}

DenseState DenseOracle::state(double t) const {
  const Eigen::Index dim = eigenvalues_.size();
  Eigen::VectorXcd phase(dim);
  for (Eigen::Index a = 0; a < dim; ++a) phase(a) = std::polar(1.0, -eigenvalues_(a) * t);
  const Eigen::MatrixXcd tilde = phase.asDiagonal() * rotated_initial_.cast<std::complex<double>>() * phase.conjugate().asDiagonal();
  const Eigen::MatrixXcd v = eigenvectors_.cast<std::complex<double>>();
  return DenseState{v * tilde * v.transpose(), twice_magnetization_};
}

CoherenceSpectrum DenseOracle::spectrum(double t) const { return dense_spectrum(state(t), system_.n_spins, t); }

CoherenceSpectrum dense_spectrum(const DenseState& state, int n_spins, double t) {
  const Eigen::Index dim = state.matrix.rows();
  CoherenceSpectrum out;
  out.time = t;
  out.intensities.assign(static_cast<std::size_t>(n_spins / 2 + 1), 0.0);
  const double trace_iz2 = n_spins * std::ldexp(1.0, n_spins) / 4.0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      // order k = M_i - M_j; only k >= 0 is stored
      const int twice_k = state.twice_magnetization[static_cast<std::size_t>(i)] -
                          state.twice_magnetization[static_cast<std::size_t>(j)];
      if (twice_k < 0 || twice_k % 4 != 0) continue;
      out.intensities[static_cast<std::size_t>(twice_k / 4)] += std::norm(state.matrix(i, j));
    }
  }
  for (double& v : out.intensities) v /= trace_iz2;
  return out;
}

CoherenceSpectrum dense_brute_force(const SpinSystem& system, double t) { return DenseOracle(system).spectrum(t); }

double dense_odd_order_content(const DenseState& state) {
  const Eigen::Index dim = state.matrix.rows();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const int twice_k = state.twice_magnetization[static_cast<std::size_t>(i)] -
                          state.twice_magnetization[static_cast<std::size_t>(j)];
      if (twice_k % 4 != 0) acc += std::norm(state.matrix(i, j));
    }
  }
  return acc;
}

}  // namespace mqnmr
