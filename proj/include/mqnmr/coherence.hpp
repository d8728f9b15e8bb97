#pragma once

#include <span>
#include <vector>

#include "mqnmr/evolve.hpp"
#include "mqnmr/sectors.hpp"

namespace mqnmr {

/// Normalized MQ coherence intensities J_k at one time, stored for k >= 0
/// only (J_k = J_{-k}). intensities[p] is J_{2p}; odd orders vanish identically.
struct CoherenceSpectrum {
  double time = 0.0;
  std::vector<double> intensities;
  double clamped = 0.0;  ///< largest negative rounding residue set to zero

  /// J_k for any integer k; zero for odd k and |k| beyond the stored range.
  double at(int order) const;
  int max_order() const { return intensities.empty() ? 0 : 2 * static_cast<int>(intensities.size() - 1); }
  /// sum over all k of J_k, i.e. J_0 + 2 sum_{k>0} J_k.
  double total() const;
};

struct TimeSeries {
  SpinSystem system;
  std::vector<double> grid;
  std::vector<CoherenceSpectrum> spectra;
  double pruned_mass = 0.0;
};

/// Half-order sums sum_i |rho_{i,i+p}|^2 of one sector state (unnormalized).
/// Throws ContractViolation when state and sector disagree.
OrderIntensities sector_intensities(const SectorState& state, const Sector& sector);

/// Which sectors feed an assembly. PlusDoubled uses the Plus subblock of each S
/// twice; valid for odd N, where both parities contribute equally.
enum class SectorCoverage { AllParities, PlusDoubled };

struct SectorContribution {
  SectorLabel label;
  OrderIntensities values;
};

/// J_k = sum_sectors n_N(S) value_k / Tr(I_z^2), with the ratio formed in log space.
/// Throws ContractViolation if a required sector is missing or duplicated.
CoherenceSpectrum assemble(const SpinSystem& system, std::span<const SectorContribution> per_sector,
                           SectorCoverage coverage = SectorCoverage::AllParities, double time = 0.0);

enum class OddDoubling { Auto, On, Off };

struct EvolveOptions {
  int threads = 0;  ///< 0: MQNMR_THREADS or hardware concurrency
  OddDoubling odd_doubling = OddDoubling::Auto;
  /// Sectors whose conserved share of sum_k J_k is smallest are skipped while
  /// their cumulative share stays at or below this budget. 0 keeps every sector.
  double prune_mass = 1e-15;
};

/// Spectral data for every retained sector of one system, computed once and
/// reused for any number of time points. Immutable after construction.
class SystemModel {
 public:
  explicit SystemModel(const SpinSystem& system, const EvolveOptions& options = {});

  const SpinSystem& system() const { return system_; }
  SectorCoverage coverage() const { return coverage_; }
  const std::vector<SectorPropagator>& sectors() const { return sectors_; }
  /// Multiplicity weight n_N(S)/Tr(I_z^2) (doubled under PlusDoubled) for sectors()[i].
  double scale(std::size_t i) const { return scales_[i]; }
  double pruned_mass() const { return pruned_mass_; }
  std::size_t pruned_count() const { return pruned_count_; }

  /// Parallel over sectors; summed in sector order.
  CoherenceSpectrum spectrum(double t) const;
  /// Parallel over time points; each point sums sectors in the same order as spectrum().
  std::vector<CoherenceSpectrum> spectra(std::span<const double> times) const;

 private:
  CoherenceSpectrum reduce(double t, std::span<const std::vector<double>> per_sector) const;

  SpinSystem system_;
  EvolveOptions options_;
  SectorCoverage coverage_;
  std::vector<SectorPropagator> sectors_;
  std::vector<double> scales_;
  double pruned_mass_ = 0.0;
  std::size_t pruned_count_ = 0;
};

/// Diagonalize once, evaluate every grid point. Grid must be finite and strictly increasing.
TimeSeries evolve_system(const SpinSystem& system, std::span<const double> grid, const EvolveOptions& options = {});

/// Max-norm distance between the cubic short-time series
///   I_z - i t A - (t^2/2) B + (i/6) t^3 C
/// and the exact rho(t) in the product basis. Needs N <= 10 and |t| <= 0.5.
double short_time_check(const SpinSystem& system, double t);

}  // namespace mqnmr
