#include <doctest.h>

#include <cmath>
#include <random>

#include "mqnmr/coherence.hpp"
#include "mqnmr/errors.hpp"
#include "mqnmr/evolve.hpp"
#include "mqnmr/oracles.hpp"
#include "mqnmr/tridiagonal.hpp"

using namespace mqnmr;

namespace {

HalfInt half(int twice) { return HalfInt::from_twice(twice); }

Eigen::MatrixXd dense_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off[static_cast<std::size_t>(i)];
  return m;
}

Eigen::MatrixXd projector(const Eigen::VectorXd& v) { return v * v.transpose() / v.squaredNorm(); }

}  // namespace

TEST_CASE("tridiagonal eigensolver against a dense reference") {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  for (int n : {1, 2, 3, 7, 40, 150}) {
    std::vector<double> diag(static_cast<std::size_t>(n)), off(static_cast<std::size_t>(n - 1));
    for (auto& x : diag) x = gauss(rng);
    for (auto& x : off) x = gauss(rng);
    const auto eig = symmetric_tridiagonal_eigen(diag, off);
    const Eigen::MatrixXd a = dense_tridiagonal(diag, off);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> reference(a);
    CHECK((eig.values - reference.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + a.norm()));
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    CHECK((eig.vectors.transpose() * eig.vectors - identity).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose() - a).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + a.norm()));
    for (Eigen::Index i = 1; i < n; ++i) CHECK(eig.values(i) >= eig.values(i - 1));
  }
}

TEST_CASE("eigenvector sign convention") {
  const std::vector<double> diag{0.0, 0.0};
  const std::vector<double> off{-std::sqrt(3.0) / 2.0};
  const auto eig = symmetric_tridiagonal_eigen(diag, off);
  // Equal-magnitude components: the first row is made positive.
  CHECK(eig.vectors(0, 0) > 0.0);
  CHECK(eig.vectors(0, 1) > 0.0);
  // Identical input gives identical bits.
  const auto again = symmetric_tridiagonal_eigen(diag, off);
  CHECK(eig.vectors == again.vectors);
  CHECK(eig.values == again.values);
}

TEST_CASE("eigensolver reports non-convergence") {
  const std::vector<double> diag{0.0, 1.0, 0.0};
  const std::vector<double> off{1.0, 1.0};
  CHECK_THROWS_AS(symmetric_tridiagonal_eigen(diag, off, 0), NumericalError);
  const std::vector<double> bad_off{1.0};
  CHECK_THROWS_AS(symmetric_tridiagonal_eigen(diag, bad_off), ContractViolation);
}

TEST_CASE("five-spin sector spectra") {
  const SpinSystem five(5);
  const auto ref = five_spin_sector_data();
  SUBCASE("S = 5/2") {
    const auto d = diagonalize(build_sector(five, {half(5), Parity::Plus}));
    for (int i = 0; i < 3; ++i) CHECK(d.eigenvalues(i) == doctest::Approx(ref.eigenvalues_5_2[static_cast<std::size_t>(i)]).epsilon(1e-13));
    // Compare projectors, column signs are convention. With negative off-diagonals the
    // vector with a minus in the middle belongs to +sqrt(7).
    const double r57 = std::sqrt(5.0 / 7.0), s2 = std::sqrt(2.0), s7 = std::sqrt(7.0), s14 = std::sqrt(14.0);
    const Eigen::Vector3d u_minus(0.5 * r57, -1.0 / s2, 3.0 / (2.0 * s7));
    const Eigen::Vector3d u_plus(0.5 * r57, 1.0 / s2, 3.0 / (2.0 * s7));
    const Eigen::Vector3d u_zero(-3.0 / s14, 0.0, std::sqrt(5.0 / 14.0));
    CHECK((projector(d.eigenvectors.col(0)) - projector(u_plus)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((projector(d.eigenvectors.col(1)) - projector(u_zero)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((projector(d.eigenvectors.col(2)) - projector(u_minus)).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("S = 3/2") {
    const auto d = diagonalize(build_sector(five, {half(3), Parity::Minus}));
    CHECK(d.eigenvalues(0) == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(d.eigenvalues(1) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    const Eigen::Vector2d u1(-1.0, 1.0), u2(1.0, 1.0);
    CHECK((projector(d.eigenvectors.col(0)) - projector(u2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((projector(d.eigenvectors.col(1)) - projector(u1)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("1x1 zero block") {
    const auto d = diagonalize(build_sector(five, {half(1), Parity::Plus}));
    CHECK(d.eigenvalues(0) == 0.0);
    CHECK(d.eigenvectors(0, 0) == 1.0);
  }
}

TEST_CASE("large sectors stay orthogonal and symmetric") {
  const SpinSystem big(601);
  for (int twice_s : {601, 401, 201, 51, 3}) {
    for (Parity p : {Parity::Plus, Parity::Minus}) {
      const auto d = diagonalize(build_sector(big, {half(twice_s), p}));
      const Eigen::Index n = d.dimension();
      CHECK((d.eigenvectors.transpose() * d.eigenvectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
      const double scale = d.eigenvalues.cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < n; ++i) CHECK(std::fabs(d.eigenvalues(i) + d.eigenvalues(n - 1 - i)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("initial states") {
  const SpinSystem five(5);
  const auto s32 = initial_state(build_sector(five, {half(3), Parity::Minus}));
  CHECK(s32.matrix.rows() == 2);
  CHECK(s32.matrix(0, 0).real() == 1.5);
  CHECK(s32.matrix(1, 1).real() == -0.5);
  CHECK(s32.matrix(0, 1) == std::complex<double>(0.0));
  const auto s52 = initial_state(build_sector(five, {half(5), Parity::Plus}));
  CHECK(s52.matrix.diagonal().real() == Eigen::Vector3d(2.5, 0.5, -1.5));
  CHECK(s52.time == 0.0);
  const auto s12 = initial_state(build_sector(five, {half(1), Parity::Plus}));
  CHECK(s12.matrix(0, 0).real() == 0.5);
}

TEST_CASE("propagation against the five-spin closed forms") {
  const SpinSystem five(5);
  const auto sector52 = build_sector(five, {half(5), Parity::Plus});
  const auto sector32 = build_sector(five, {half(3), Parity::Minus});
  const auto d52 = diagonalize(sector52);
  const auto d32 = diagonalize(sector32);
  const auto rho52_0 = initial_state(sector52);
  const auto rho32_0 = initial_state(sector32);

  CHECK((propagate(d52, rho52_0, 0.0).matrix - rho52_0.matrix).cwiseAbs().maxCoeff() < 1e-14);
  for (double t : {0.1, 0.7, 1.3, 2.9, 5.5, 17.0}) {
    CHECK((propagate(d32, rho32_0, t).matrix - FiveSpinSectorData::rho_3_2(t)).cwiseAbs().maxCoeff() < 1e-12);
    const auto rho = propagate(d52, rho52_0, t).matrix;
    CHECK((rho - FiveSpinSectorData::rho_5_2(t)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(rho(0, 2).real() == doctest::Approx(-24.0 * std::sqrt(5.0) / 49.0 * std::pow(std::sin(std::sqrt(7.0) * t / 2.0), 4)));
  }
  CHECK(FiveSpinSectorData::a22(0.0) == doctest::Approx(0.5));
  CHECK(FiveSpinSectorData::a11(0.0) == doctest::Approx(2.5));
  CHECK(FiveSpinSectorData::a33(0.0) == doctest::Approx(-1.5));
  const double peak = std::numbers::pi / std::sqrt(7.0);
  CHECK(FiveSpinSectorData::a13(peak) == doctest::Approx(-24.0 * std::sqrt(5.0) / 49.0));
}

TEST_CASE("propagation invariants") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pick_t(0.0, 100.0);
  const SpinSystem system(31, 1.7);
  for (const auto& label : enumerate_sectors(system)) {
    const auto sector = build_sector(system, label);
    const auto decomp = diagonalize(sector);
    const auto rho0 = initial_state(sector);
    const SectorPropagator fast(sector, decomp);
    for (int k = 0; k < 3; ++k) {
      const double t = pick_t(rng);
      const auto rho = propagate(decomp, rho0, t);
      CHECK((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + rho.matrix.cwiseAbs().maxCoeff()));
      CHECK(std::fabs(rho.matrix.trace().real() - sector.sum_m()) < 1e-12 * (1.0 + sector.sum_m_squared()));
      // Spectral propagation composes: 0 -> t1 -> t equals 0 -> t.
      const double t1 = pick_t(rng);
      const auto via = propagate(decomp, propagate(decomp, rho0, t1), t);
      CHECK((via.matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + sector.sum_m_squared()));
      // The cached fast path reproduces the direct sandwich.
      CHECK((fast.state(t) - rho.matrix).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + sector.sum_m_squared()));
      std::vector<double> sums(static_cast<std::size_t>(fast.dimension()));
      fast.intensities(t, sums);
      const auto direct = sector_intensities(rho, sector);
      for (std::size_t p = 0; p < sums.size(); ++p) CHECK(std::fabs(sums[p] - direct[p]) < 1e-9 * sector.sum_m_squared());
    }
  }
}

TEST_CASE("propagate rejects mismatched inputs") {
  const SpinSystem five(5);
  const auto d52 = diagonalize(build_sector(five, {half(5), Parity::Plus}));
  const auto rho32 = initial_state(build_sector(five, {half(3), Parity::Minus}));
  CHECK_THROWS_AS(propagate(d52, rho32, 1.0), ContractViolation);
  auto wrong = initial_state(build_sector(five, {half(5), Parity::Plus}));
  wrong.matrix = Eigen::MatrixXcd::Zero(2, 2);
  CHECK_THROWS_AS(propagate(d52, wrong, 1.0), ContractViolation);
}
