#pragma once

#include <numbers>
#include <vector>

#include "mqnmr/coherence.hpp"
#include "mqnmr/sectors.hpp"

namespace mqnmr {

/// Averaging window [t0, t0 + k0 * period]. The default period 4 pi / sqrt(3)
/// is 2 pi over the smallest positive eigenvalue sqrt(3)/2 (in units of D).
struct AveragingWindow {
  double t0 = 31.0;
  int k0 = 2;
  double period = 4.0 * std::numbers::pi / std::numbers::sqrt3;
};

struct AverageOptions {
  double initial_step = 0.02;
  double tolerance = 1e-7;  ///< max change of any averaged J_k between successive halvings
  int max_halvings = 12;
  EvolveOptions evolve;
};

/// Time-averaged intensities; averaged[p] is the mean of J_{2p} over the window.
struct AveragedProfile {
  explicit AveragedProfile(const SpinSystem& s) : system(s) {}

  SpinSystem system;
  double t0 = 0.0;
  int k0 = 0;
  double period = 0.0;
  std::vector<double> averaged;
  std::size_t intervals = 0;  ///< Simpson intervals at convergence
  double last_change = 0.0;   ///< max |delta J_k| of the final halving
  double pruned_mass = 0.0;

  double at(int order) const;
  double total() const;
};

/// Composite Simpson over the window, halving the step until every averaged
/// J_k moves by less than options.tolerance. Throws NumericalError otherwise.
AveragedProfile time_average(const SpinSystem& system, const AveragingWindow& window = {},
                             const AverageOptions& options = {});

/// Same, reusing spectral data already computed for the system.
AveragedProfile time_average(const SystemModel& model, const AveragingWindow& window,
                             const AverageOptions& options = {});

struct FamilyPoint {
  int order = 0;
  double value = 0.0;
};

/// Gamma1 holds orders 2, 6, 10, ... (k = 2 mod 4); gamma2 holds 4, 8, 12, ...
/// J_0 belongs to neither.
struct FamilySplit {
  std::vector<FamilyPoint> gamma1;
  std::vector<FamilyPoint> gamma2;
  double zero_order = 0.0;
};

FamilySplit split_families(const AveragedProfile& profile);
FamilySplit split_families(const std::vector<double>& by_half_order);

/// Parameters of the two-family profile in half-order n = k/2:
///   gamma1 (odd n):  A1 (1 + 2 a1 |n| + 4 a2 n^2) exp(-2 alpha1 |n|)
///   gamma2 (even n): A2 exp(-2 alpha2 |n|)
struct ProfileParameters {
  double a_cap_1 = 0.0;
  double a_cap_2 = 0.0;
  double alpha_1 = 0.0;
  double alpha_2 = 0.0;
  double a_1 = 0.0;
  double a_2 = 0.0;

  /// The same curves written with the coherence order k = 2n in place of n:
  /// alpha and a1 halve, a2 quarters, amplitudes are unchanged.
  ProfileParameters per_order() const;
  /// Inverse of per_order().
  static ProfileParameters from_per_order(const ProfileParameters& per_order);
};

double gamma1_model(const ProfileParameters& p, double half_order);
double gamma2_model(const ProfileParameters& p, double half_order);

/// Closed-form infinite sums of both families, i.e. 1 - J_0 when normalized.
double family_mass(const ProfileParameters& p);

/// J0 + 2 A2 / (e^{4 alpha2} - 1)
///    + A1 [sinh^2(2 alpha1) + a1 sinh(4 alpha1) + 6 a2 + 2 a2 cosh(4 alpha1)] / sinh^3(2 alpha1) - 1
double normalization_residual(const ProfileParameters& p, double j_bar_zero);

struct FitOptions {
  double noise_floor = 1e-12;  ///< points at or below are dropped
  int min_points = 4;          ///< per family
};

struct ProfileFit {
  /// All of (A1, alpha1, a1, a2, alpha2) free, A2 eliminated by normalization.
  ProfileParameters joint;
  /// Gamma2 fit alone for (A2, alpha2); then (alpha1, a1, a2) with A1 fixed by normalization.
  ProfileParameters staged;
  /// Unconstrained Gamma1 fit of (A1, alpha1, a1, a2); starting point of the staged step.
  ProfileParameters free_gamma1;
  double j_bar_zero = 0.0;
  double log_rms_gamma1 = 0.0;  ///< RMS of ln(model / data) for the joint fit
  double log_rms_gamma2 = 0.0;
  double rms_gamma1 = 0.0;      ///< RMS absolute residual for the joint fit
  double rms_gamma2 = 0.0;
  int points_gamma1 = 0;
  int points_gamma2 = 0;
};

/// Least squares in linear intensity. Throws FitError for too few points,
/// non-positive decay rates, or non-positive amplitudes.
ProfileFit fit_profile(const FamilySplit& split, double j_bar_zero, const FitOptions& options = {});

}  // namespace mqnmr
