#include "mqnmr/evolve.hpp"

#include <cmath>
#include <complex>

#include "mqnmr/errors.hpp"
#include "mqnmr/tridiagonal.hpp"

namespace mqnmr {

SpectralDecomposition diagonalize(const Sector& sector) {
  SpectralDecomposition out;
  out.label = sector.label;
  out.coupling = sector.coupling;
  const std::vector<double> diagonal(sector.dimension(), 0.0);
  try {
    auto eig = symmetric_tridiagonal_eigen(diagonal, sector.off_diagonal);
    out.eigenvalues = std::move(eig.values);
    out.eigenvectors = std::move(eig.vectors);
  } catch (const NumericalError& err) {
    throw NumericalError("diagonalize " + sector.label.to_string() + ": " + err.what());
  }
  return out;
}

SectorState initial_state(const Sector& sector) {
  const auto d = static_cast<Eigen::Index>(sector.dimension());
  SectorState state;
  state.label = sector.label;
  state.matrix = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) state.matrix(i, i) = sector.m_values[static_cast<std::size_t>(i)].value();
  return state;
}

SectorState propagate(const SpectralDecomposition& decomp, const SectorState& initial, double t) {
  if (!(decomp.label == initial.label)) {
    throw ContractViolation("propagate: decomposition " + decomp.label.to_string() + " applied to state " +
                            initial.label.to_string());
  }
  const Eigen::Index d = decomp.dimension();
  if (initial.matrix.rows() != d || initial.matrix.cols() != d) {
    throw ContractViolation("propagate: state dimension does not match decomposition");
  }
  const double dt = t - initial.time;
  Eigen::VectorXcd phases(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    phases(i) = std::polar(1.0, -decomp.eigenvalues(i) / decomp.coupling * dt);
  }
  const Eigen::MatrixXcd v = decomp.eigenvectors.cast<std::complex<double>>();
  const Eigen::MatrixXcd u = v * phases.asDiagonal() * v.adjoint();
  SectorState out;
  out.label = initial.label;
  out.time = t;
  out.matrix = u * initial.matrix * u.adjoint();
  return out;
}

SectorPropagator::SectorPropagator(const Sector& sector, SpectralDecomposition decomp) : decomp_(std::move(decomp)) {
  const Eigen::Index d = decomp_.dimension();
  if (static_cast<std::size_t>(d) != sector.dimension() || !(sector.label == decomp_.label)) {
    throw ContractViolation("SectorPropagator: sector and decomposition disagree");
  }
  frequencies_ = decomp_.eigenvalues / decomp_.coupling;
  Eigen::VectorXd m(d);
  for (Eigen::Index i = 0; i < d; ++i) m(i) = sector.m_values[static_cast<std::size_t>(i)].value();
  const auto& v = decomp_.eigenvectors;
  rotated_initial_ = v.transpose() * m.asDiagonal() * v;
}

Eigen::MatrixXcd SectorPropagator::state(double t) const {
  const Eigen::Index d = dimension();
  Eigen::MatrixXcd tilde(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      tilde(a, b) = rotated_initial_(a, b) * std::polar(1.0, -(frequencies_(a) - frequencies_(b)) * t);
    }
  }
  const Eigen::MatrixXcd v = decomp_.eigenvectors.cast<std::complex<double>>();
  return v * tilde * v.transpose();
}

void SectorPropagator::intensities(double t, std::span<double> out) const {
  const Eigen::Index d = dimension();
  if (static_cast<Eigen::Index>(out.size()) < d) throw ContractViolation("SectorPropagator: output too short");
  if (d == 1) {
    out[0] = rotated_initial_(0, 0) * rotated_initial_(0, 0);
    return;
  }
  Eigen::VectorXd c(d), s(d);
  for (Eigen::Index a = 0; a < d; ++a) {
    c(a) = std::cos(frequencies_(a) * t);
    s(a) = std::sin(frequencies_(a) * t);
  }
  // cos((w_a - w_b)t) and sin((w_a - w_b)t) from products of single phases.
  Eigen::MatrixXd phased(d, 2 * d);
  auto re_part = phased.leftCols(d);
  auto im_part = phased.rightCols(d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      const double r = rotated_initial_(a, b);
      re_part(a, b) = r * (c(a) * c(b) + s(a) * s(b));
      im_part(a, b) = -r * (s(a) * c(b) - c(a) * s(b));
    }
  }
  const auto& v = decomp_.eigenvectors;
  const Eigen::MatrixXd left = v * phased;
  Eigen::MatrixXd re = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(d, d);
  re.triangularView<Eigen::Upper>() = left.leftCols(d) * v.transpose();
  im.triangularView<Eigen::Upper>() = left.rightCols(d) * v.transpose();
  for (Eigen::Index p = 0; p < d; ++p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i + p < d; ++i) {
      const double x = re(i, i + p);
      const double y = im(i, i + p);
      acc += x * x + y * y;
    }
    out[static_cast<std::size_t>(p)] = acc;
  }
}

}  // namespace mqnmr
