#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mqnmr/half_integer.hpp"

namespace mqnmr {

/// N spin-1/2 particles sharing one motionally averaged dipolar coupling D.
/// All dynamics is expressed in dimensionless time t = D * tau.
struct SpinSystem {
  SpinSystem(int n_spins, double coupling = 1.0);

  int n_spins;
  double coupling;
};

/// Eigenspace of exp(i pi I_z), labelled by the parity of the number of
/// flipped spins N/2 - M. Plus holds the fully polarized state M = N/2.
enum class Parity { Plus, Minus };

std::string to_string(Parity p);

struct SectorLabel {
  HalfInt total_spin;
  Parity parity;

  bool operator==(const SectorLabel&) const = default;
  std::string to_string() const;
};

/// One (S, parity) block of the averaged MQ Hamiltonian in the |S, M> basis.
///
/// m_values descend in steps of 2. The block is real symmetric tridiagonal
/// with zero diagonal; off_diagonal[i] couples m_values[i] and m_values[i+1].
struct Sector {
  SectorLabel label;
  std::vector<HalfInt> m_values;
  std::vector<double> off_diagonal;
  double weight_log = 0.0;  ///< ln n_N(S)
  double coupling = 1.0;

  std::size_t dimension() const { return m_values.size(); }
  /// Tr(rho0^2) within the block, i.e. the sum of M^2.
  double sum_m_squared() const;
  double sum_m() const;
};

/// All non-empty (S, parity) labels, ordered by descending S and Plus before Minus.
std::vector<SectorLabel> enumerate_sectors(const SpinSystem& system);

/// Whether total_spin is an allowed S for n_spins (0 <= S <= N/2, 2S = N mod 2).
bool is_valid_total_spin(int n_spins, HalfInt total_spin);

/// ln n_N(S) with n_N(S) = N! (2S+1) / ((N/2+S+1)! (N/2-S)!), via lgamma.
/// Throws DomainError for an invalid (N, S) pair.
double multiplicity_log(int n_spins, HalfInt total_spin);

/// Exact n_N(S) for N <= 64. Throws DomainError above that or for invalid (N, S).
std::uint64_t multiplicity_exact(int n_spins, HalfInt total_spin);

/// <M|(I+)^2|M-2> = sqrt((S+M)(S+M-1)(S-M+1)(S-M+2)); zero unless -S+2 <= M <= S.
double raising_squared_element(HalfInt total_spin, HalfInt m);

/// M values of one parity subblock, descending. Empty when the subblock does not exist.
std::vector<HalfInt> sector_m_values(int n_spins, const SectorLabel& label);

Sector build_sector(const SpinSystem& system, const SectorLabel& label);

/// Detail behind verify_dimension_identity.
struct DimensionReport {
  int n_spins = 0;
  bool exact_path = false;       ///< integer arithmetic used (N <= 64)
  unsigned __int128 exact_sum = 0;
  unsigned __int128 exact_target = 0;
  double log_relative_error = 0.0;  ///< |sum / 2^N - 1| on the log-space path
  bool holds = false;
};

DimensionReport dimension_report(int n_spins);

/// sum_S n_N(S) (2S+1) == 2^N; exact for N <= 64, log-space to 1e-12 relative above.
bool verify_dimension_identity(int n_spins);

/// Binomial partial-sum identities behind the dimension count, checked in exact
/// rational arithmetic. They index sums by integer S, so they apply to even N only.
struct BinomialIdentities {
  bool applicable = false;
  bool binomial_half_sum = false;       ///< sum_{S=0}^{N/2} C(N+1, S) = 2^N
  bool shifted_sum_one = false;         ///< sum_{S=1}^{N/2} C(N, S-1) = 2^(N-1) - C(N, N/2)/2
  bool shifted_sum_two = false;         ///< sum_{S=2}^{N/2} C(N-1, S-2) = 2^(N-2) - C(N, N/2)/2
  bool decomposition = false;           ///< squared-(2S+1) sum split into S^2, S and constant parts
  bool first_moment = false;            ///< 4/(N+1) sum S C(N+1, N/2-S)
  bool second_moment = false;           ///< 4/(N+1) sum S^2 C(N+1, N/2-S)
  bool all() const {
    return applicable && binomial_half_sum && shifted_sum_one && shifted_sum_two && decomposition &&
           first_moment && second_moment;
  }
};

/// Exact evaluation for even N <= 60.
BinomialIdentities check_binomial_identities(int n_spins);

/// ln Tr(I_z^2) = ln(N 2^N / 4).
double log_trace_iz_squared(int n_spins);

}  // namespace mqnmr
