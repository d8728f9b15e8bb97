#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mqnmr/errors.hpp"
#include "mqnmr/least_squares.hpp"
#include "mqnmr/profile.hpp"

using namespace mqnmr;

namespace {

// Noiseless two-family data for half-orders 1..n_max with J0 chosen so the
// normalization holds exactly.
std::pair<FamilySplit, double> synthetic(const ProfileParameters& p, int n_max) {
  std::vector<double> by_half(static_cast<std::size_t>(n_max + 1), 0.0);
  for (int n = 1; n <= n_max; ++n) {
    by_half[static_cast<std::size_t>(n)] = n % 2 == 1 ? gamma1_model(p, n) : gamma2_model(p, n);
  }
  const double j0 = 1.0 - family_mass(p);
  by_half[0] = j0;
  return {split_families(by_half), j0};
}

void check_relative(double got, double want, double tol) {
  CHECK(std::fabs(got - want) <= tol * std::fabs(want));
}

}  // namespace

TEST_CASE("least squares on a small problem") {
  // Exponential decay y = 3 exp(-0.4 x).
  const std::vector<double> xs{0, 1, 2, 3, 4, 5};
  const auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) r(static_cast<Eigen::Index>(i)) = p(0) * std::exp(-p(1) * xs[i]) - 3.0 * std::exp(-0.4 * xs[i]);
    return r;
  };
  const auto result = levenberg_marquardt(residuals, Eigen::Vector2d(1.0, 1.0));
  CHECK(result.converged);
  CHECK(result.x(0) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(result.x(1) == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("family split") {
  const std::vector<double> by_half{0.2, 0.1, 0.05, 0.02, 0.01, 0.004};
  const auto split = split_families(by_half);
  CHECK(split.zero_order == 0.2);
  REQUIRE(split.gamma1.size() == 3);
  REQUIRE(split.gamma2.size() == 2);
  CHECK(split.gamma1[0].order == 2);
  CHECK(split.gamma1[1].order == 6);
  CHECK(split.gamma1[2].order == 10);
  CHECK(split.gamma1[2].value == 0.004);
  CHECK(split.gamma2[0].order == 4);
  CHECK(split.gamma2[1].order == 8);
  CHECK(split.gamma2[1].value == 0.01);
  CHECK_THROWS_AS(split_families(std::vector<double>{1.0, 0.0}), DomainError);
}

TEST_CASE("parameter conventions") {
  const ProfileParameters half{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto k = half.per_order();
  CHECK(k.a_cap_1 == 0.1);
  CHECK(k.a_cap_2 == 0.2);
  CHECK(k.alpha_1 == doctest::Approx(0.15));
  CHECK(k.alpha_2 == doctest::Approx(0.2));
  CHECK(k.a_1 == doctest::Approx(0.25));
  CHECK(k.a_2 == doctest::Approx(0.15));
  const auto back = ProfileParameters::from_per_order(k);
  CHECK(back.alpha_1 == doctest::Approx(half.alpha_1));
  CHECK(back.a_2 == doctest::Approx(half.a_2));
  // The same curve either way: half-order n and order k = 2n.
  for (int n = 1; n < 9; n += 2) {
    const double direct = gamma1_model(half, n);
    const double via_k = k.a_cap_1 * (1 + 2 * k.a_1 * 2 * n + 4 * k.a_2 * 4 * n * n) * std::exp(-2 * k.alpha_1 * 2 * n);
    CHECK(direct == doctest::Approx(via_k).epsilon(1e-14));
  }
}

TEST_CASE("family mass matches a direct sum") {
  const ProfileParameters p{0.09, 0.08, 0.18, 0.11, -0.13, 0.024};
  double direct = 0.0;
  for (int n = 1; n < 2000; ++n) direct += 2.0 * (n % 2 == 1 ? gamma1_model(p, n) : gamma2_model(p, n));
  CHECK(family_mass(p) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(normalization_residual(p, 1.0 - direct) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(normalization_residual(ProfileParameters{}, 1.0) == 0.0);
}

TEST_CASE("N=201 reference parameters nearly normalize in the per-order reading") {
  const ProfileParameters reference{0.0875, 0.0912, 0.0838, 0.0570, -0.0648, 0.0059};
  const auto half = ProfileParameters::from_per_order(reference);
  CHECK(std::fabs(normalization_residual(half, 0.1973)) < 0.01);
  // Taken literally as half-order parameters they overshoot by almost a factor of two.
  CHECK(normalization_residual(reference, 0.1973) > 0.5);
}

TEST_CASE("fit round trip on noiseless data") {
  const auto truth = ProfileParameters::from_per_order({0.0875, 0.0912, 0.0838, 0.0570, -0.0648, 0.0059});
  const auto [split, j0] = synthetic(truth, 100);
  const auto fit = fit_profile(split, j0);
  for (const auto* p : {&fit.joint, &fit.staged, &fit.free_gamma1}) {
    check_relative(p->a_cap_1, truth.a_cap_1, 1e-6);
    check_relative(p->alpha_1, truth.alpha_1, 1e-6);
    check_relative(p->a_1, truth.a_1, 1e-6);
    check_relative(p->a_2, truth.a_2, 1e-6);
  }
  for (const auto* p : {&fit.joint, &fit.staged}) {
    check_relative(p->a_cap_2, truth.a_cap_2, 1e-6);
    check_relative(p->alpha_2, truth.alpha_2, 1e-6);
  }
  CHECK(std::fabs(normalization_residual(fit.joint, j0)) < 1e-12);
  CHECK(std::fabs(normalization_residual(fit.staged, j0)) < 1e-12);
  CHECK(fit.j_bar_zero == j0);
  CHECK(fit.points_gamma1 > 4);
  CHECK(fit.rms_gamma1 < 1e-12);
}

TEST_CASE("fit round trip across the parameter range") {
  const std::vector<ProfileParameters> cases{
      {0.12, 0.10, 0.20, 0.15, -0.10, 0.02},
      {0.05, 0.07, 0.09, 0.08, 0.0, 0.0},
      {0.04, 0.06, 0.10, 0.07, -0.14, 0.008},
  };
  for (const auto& truth : cases) {
    const auto [split, j0] = synthetic(truth, 160);
    const auto fit = fit_profile(split, j0);
    check_relative(fit.joint.alpha_1, truth.alpha_1, 1e-6);
    check_relative(fit.joint.alpha_2, truth.alpha_2, 1e-6);
    check_relative(fit.joint.a_cap_1, truth.a_cap_1, 1e-6);
    CHECK(std::fabs(fit.joint.a_1 - truth.a_1) <= 1e-6 * std::max(std::fabs(truth.a_1), 1e-3));
    CHECK(std::fabs(fit.joint.a_2 - truth.a_2) <= 1e-6 * std::max(std::fabs(truth.a_2), 1e-3));
  }
}

TEST_CASE("fit rejects thin data") {
  FamilySplit split;
  split.gamma1 = {{2, 0.1}, {6, 0.01}, {10, 0.001}};
  split.gamma2 = {{4, 0.05}, {8, 0.005}, {12, 0.0005}, {16, 5e-5}};
  CHECK_THROWS_AS(fit_profile(split, 0.5), FitError);
  split.gamma1.push_back({14, 1e-13});  // below the noise floor
  CHECK_THROWS_AS(fit_profile(split, 0.5), FitError);
}

TEST_CASE("time average of two spins matches the closed form") {
  // J_0 = cos^2 t, so the mean over [a, a + L] is 1/2 + (sin 2(a+L) - sin 2a) / (4L).
  const AveragingWindow window;
  const auto profile = time_average(SpinSystem(2), window);
  const double a = window.t0, length = window.k0 * window.period;
  const double expected = 0.5 + (std::sin(2 * (a + length)) - std::sin(2 * a)) / (4 * length);
  CHECK(profile.at(0) == doctest::Approx(expected).epsilon(1e-7));
  CHECK(profile.at(2) == doctest::Approx((1.0 - expected) / 2.0).epsilon(1e-7));
  CHECK(profile.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(profile.t0 == window.t0);
  CHECK(profile.k0 == window.k0);
  CHECK(profile.intervals >= 2);
}

TEST_CASE("time average converges and is insensitive to window length") {
  const SpinSystem system(51);
  const SystemModel model(system);
  const auto two = time_average(model, AveragingWindow{31.0, 2});
  const auto four = time_average(model, AveragingWindow{31.0, 4});
  CHECK(two.last_change < 1e-7);
  CHECK(two.total() == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t p = 0; p < two.averaged.size(); ++p) CHECK(std::fabs(two.averaged[p] - four.averaged[p]) < 2e-3);
}

TEST_CASE("time average input validation") {
  const SpinSystem system(5);
  CHECK_THROWS_AS(time_average(system, AveragingWindow{-1.0, 2}), DomainError);
  CHECK_THROWS_AS(time_average(system, AveragingWindow{31.0, 0}), DomainError);
  CHECK_THROWS_AS(time_average(system, AveragingWindow{31.0, 2, 0.0}), DomainError);
  AverageOptions strict;
  strict.tolerance = 1e-30;
  strict.max_halvings = 1;
  CHECK_THROWS_AS(time_average(system, AveragingWindow{}, strict), NumericalError);
}
