#include "mqnmr/sectors.hpp"

#include <cmath>
#include <numeric>

#include "mqnmr/errors.hpp"

namespace mqnmr {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

// C(n, k) exactly; zero outside 0 <= k <= n. Valid while the result fits in 128 bits.
u128 binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<u128>(n - k + i) / static_cast<u128>(i);
  }
  return result;
}

// N/2 - S as an integer (number of flipped spins at M = S).
int flips_at_top(int n_spins, HalfInt total_spin) { return (n_spins - total_spin.twice()) / 2; }

}  // namespace

SpinSystem::SpinSystem(int n, double d) : n_spins(n), coupling(d) {
  if (n_spins < 2) throw DomainError("SpinSystem: n_spins must be >= 2, got " + std::to_string(n_spins));
  if (coupling == 0.0 || !std::isfinite(coupling)) throw DomainError("SpinSystem: coupling must be finite and nonzero");
}

std::string to_string(Parity p) { return p == Parity::Plus ? "+" : "-"; }

std::string SectorLabel::to_string() const { return "S=" + total_spin.to_string() + "(" + mqnmr::to_string(parity) + ")"; }

double Sector::sum_m_squared() const {
  double s = 0.0;
  for (auto m : m_values) s += m.value() * m.value();
  return s;
}

double Sector::sum_m() const {
  double s = 0.0;
  for (auto m : m_values) s += m.value();
  return s;
}

bool is_valid_total_spin(int n_spins, HalfInt total_spin) {
  return n_spins >= 1 && total_spin.twice() >= 0 && total_spin.twice() <= n_spins &&
         (n_spins - total_spin.twice()) % 2 == 0;
}

std::vector<HalfInt> sector_m_values(int n_spins, const SectorLabel& label) {
  if (!is_valid_total_spin(n_spins, label.total_spin)) {
    throw DomainError("invalid total spin " + label.total_spin.to_string() + " for N=" + std::to_string(n_spins));
  }
  // Plus collects M with N/2 - M even.
  const HalfInt s = label.total_spin;
  const bool top_is_plus = flips_at_top(n_spins, s) % 2 == 0;
  HalfInt m = (top_is_plus == (label.parity == Parity::Plus)) ? s : s - 1;
  std::vector<HalfInt> out;
  for (; m >= -s; m = m - 2) out.push_back(m);
  return out;
}

std::vector<SectorLabel> enumerate_sectors(const SpinSystem& system) {
  std::vector<SectorLabel> labels;
  const int n = system.n_spins;
  for (int twice_s = n; twice_s >= 0; twice_s -= 2) {
    for (Parity p : {Parity::Plus, Parity::Minus}) {
      SectorLabel label{HalfInt::from_twice(twice_s), p};
      if (!sector_m_values(n, label).empty()) labels.push_back(label);
    }
  }
  return labels;
}

double multiplicity_log(int n_spins, HalfInt total_spin) {
  if (!is_valid_total_spin(n_spins, total_spin)) {
    throw DomainError("multiplicity: invalid (N=" + std::to_string(n_spins) + ", S=" + total_spin.to_string() + ")");
  }
  const double n = n_spins;
  const double s = total_spin.value();
  return std::lgamma(n + 1.0) + std::log(2.0 * s + 1.0) - std::lgamma(n / 2.0 + s + 2.0) -
         std::lgamma(n / 2.0 - s + 1.0);
}

std::uint64_t multiplicity_exact(int n_spins, HalfInt total_spin) {
  if (!is_valid_total_spin(n_spins, total_spin)) {
    throw DomainError("multiplicity: invalid (N=" + std::to_string(n_spins) + ", S=" + total_spin.to_string() + ")");
  }
  if (n_spins > 64) throw DomainError("multiplicity_exact: N > 64 overflows; use multiplicity_log");
  // N!(2S+1)/((N/2+S+1)!(N/2-S)!) = C(N, N/2-S) (2S+1) / (N/2+S+1)
  const int k = flips_at_top(n_spins, total_spin);
  const u128 numerator = binomial(n_spins, k) * static_cast<u128>(total_spin.twice() + 1);
  const u128 denominator = static_cast<u128>(n_spins - k + 1);
  return static_cast<std::uint64_t>(numerator / denominator);
}

double raising_squared_element(HalfInt total_spin, HalfInt m) {
  if (m > total_spin || m < -total_spin + 2) return 0.0;
  const double s = total_spin.value();
  const double mv = m.value();
  return std::sqrt((s + mv) * (s + mv - 1.0) * (s - mv + 1.0) * (s - mv + 2.0));
}

Sector build_sector(const SpinSystem& system, const SectorLabel& label) {
  Sector sector;
  sector.label = label;
  sector.m_values = sector_m_values(system.n_spins, label);
  if (sector.m_values.empty()) throw DomainError("build_sector: empty subblock " + label.to_string());
  sector.weight_log = multiplicity_log(system.n_spins, label.total_spin);
  sector.coupling = system.coupling;
  const double scale = -system.coupling / 4.0;
  sector.off_diagonal.reserve(sector.m_values.size() - 1);
  for (std::size_t i = 0; i + 1 < sector.m_values.size(); ++i) {
    sector.off_diagonal.push_back(scale * raising_squared_element(label.total_spin, sector.m_values[i]));
  }
  return sector;
}

DimensionReport dimension_report(int n_spins) {
  if (n_spins < 1) throw DomainError("dimension identity needs N >= 1");
  DimensionReport report;
  report.n_spins = n_spins;
  if (n_spins <= 64) {
    report.exact_path = true;
    u128 sum = 0;
    for (int twice_s = n_spins; twice_s >= 0; twice_s -= 2) {
      const auto s = HalfInt::from_twice(twice_s);
      sum += static_cast<u128>(multiplicity_exact(n_spins, s)) * static_cast<u128>(twice_s + 1);
    }
    report.exact_sum = sum;
    report.exact_target = static_cast<u128>(1) << n_spins;
    report.holds = sum == report.exact_target;
    report.log_relative_error = report.holds ? 0.0 : 1.0;
    return report;
  }
  // Terms n_N(S)(2S+1)/2^N are O(1) at most; compensated summation in long double.
  const long double log_two_n = static_cast<long double>(n_spins) * std::log(2.0L);
  long double sum = 0.0L;
  long double carry = 0.0L;
  for (int twice_s = n_spins; twice_s >= 0; twice_s -= 2) {
    const auto s = HalfInt::from_twice(twice_s);
    const long double term = std::exp(static_cast<long double>(multiplicity_log(n_spins, s)) +
                                      std::log(static_cast<long double>(twice_s + 1)) - log_two_n);
    const long double y = term - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  report.log_relative_error = static_cast<double>(std::fabs(sum - 1.0L));
  report.holds = report.log_relative_error <= 1e-12;
  return report;
}

bool verify_dimension_identity(int n_spins) { return dimension_report(n_spins).holds; }

BinomialIdentities check_binomial_identities(int n) {
  BinomialIdentities id;
  if (n < 2 || n % 2 != 0 || n > 60) return id;
  id.applicable = true;
  const int half = n / 2;
  const i128 pow_n = static_cast<i128>(1) << n;
  const i128 central = static_cast<i128>(binomial(n, half));

  i128 a1 = 0;
  for (int s = 0; s <= half; ++s) a1 += static_cast<i128>(binomial(n + 1, s));
  id.binomial_half_sum = a1 == pow_n;

  // Both shifted sums carry C(N, N/2)/2; compare doubled values to stay integral.
  i128 a1b = 0;
  for (int s = 1; s <= half; ++s) a1b += static_cast<i128>(binomial(n, s - 1));
  id.shifted_sum_one = 2 * a1b == pow_n - central;
  i128 a1c = 0;
  for (int s = 2; s <= half; ++s) a1c += static_cast<i128>(binomial(n - 1, s - 2));
  id.shifted_sum_two = 2 * a1c == pow_n / 2 - central;

  // Everything below is multiplied by (N+1) to stay integral.
  i128 lhs = 0;   // (N+1) sum N!(2S+1)^2 / ((N/2+S+1)!(N/2-S)!)
  i128 m0 = 0;    // sum C(N+1, N/2-S)
  i128 m1 = 0;    // sum S C(N+1, N/2-S)
  i128 m2 = 0;    // sum S^2 C(N+1, N/2-S)
  for (int s = 0; s <= half; ++s) {
    const i128 c = static_cast<i128>(binomial(n + 1, half - s));
    lhs += static_cast<i128>(2 * s + 1) * (2 * s + 1) * c;
    m0 += c;
    m1 += s * c;
    m2 += static_cast<i128>(s) * s * c;
  }
  id.decomposition = lhs == 4 * m2 + 4 * m1 + m0 && lhs == (n + 1) * pow_n;
  // 4 m1 = N 2^(N+1) - (N+1) 2^(N+1) + 2 (N+1) C(N, N/2)
  id.first_moment = 4 * m1 == n * 2 * pow_n - (n + 1) * 2 * pow_n + 2 * (n + 1) * central;
  // 4 m2 = 2^N N^2 - (N+1)(N-2) 2^N - 2 (N+1) C(N, N/2)
  id.second_moment = 4 * m2 == pow_n * n * n - static_cast<i128>(n + 1) * (n - 2) * pow_n - 2 * (n + 1) * central;
  return id;
}

double log_trace_iz_squared(int n_spins) {
  return std::log(static_cast<double>(n_spins)) + n_spins * std::log(2.0) - std::log(4.0);
}

}  // namespace mqnmr
