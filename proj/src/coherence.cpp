#include "mqnmr/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "mqnmr/errors.hpp"
#include "mqnmr/oracles.hpp"
#include "mqnmr/parallel.hpp"

namespace mqnmr {

namespace {

constexpr double kClampGuard = 1e-14;

std::size_t order_slots(int n_spins) { return static_cast<std::size_t>(n_spins / 2 + 1); }

double sector_scale(const SpinSystem& system, double weight_log, SectorCoverage coverage) {
  const double factor = coverage == SectorCoverage::PlusDoubled ? 2.0 : 1.0;
  return factor * std::exp(weight_log - log_trace_iz_squared(system.n_spins));
}

std::vector<SectorLabel> required_labels(const SpinSystem& system, SectorCoverage coverage) {
  auto labels = enumerate_sectors(system);
  if (coverage == SectorCoverage::PlusDoubled) {
    if (system.n_spins % 2 == 0) throw ContractViolation("parity doubling requires odd N");
    std::erase_if(labels, [](const SectorLabel& l) { return l.parity != Parity::Plus; });
  }
  return labels;
}

void accumulate(std::vector<double>& total, double scale, std::span<const double> values) {
  for (std::size_t p = 0; p < values.size(); ++p) total[p] += scale * values[p];
}

void clamp_negative(CoherenceSpectrum& spectrum) {
  for (double& j : spectrum.intensities) {
    if (j < 0.0) {
      if (j < -kClampGuard) throw NumericalError("negative intensity " + std::to_string(j) + " beyond rounding");
      spectrum.clamped = std::max(spectrum.clamped, -j);
      j = 0.0;
    }
  }
}

}  // namespace

double CoherenceSpectrum::at(int order) const {
  if (order % 2 != 0) return 0.0;
  const auto p = static_cast<std::size_t>(std::abs(order) / 2);
  return p < intensities.size() ? intensities[p] : 0.0;
}

double CoherenceSpectrum::total() const {
  if (intensities.empty()) return 0.0;
  double tail = 0.0;
  for (std::size_t p = intensities.size() - 1; p >= 1; --p) tail += intensities[p];
  return intensities[0] + 2.0 * tail;
}

OrderIntensities sector_intensities(const SectorState& state, const Sector& sector) {
  const auto d = static_cast<Eigen::Index>(sector.dimension());
  if (!(state.label == sector.label) || state.matrix.rows() != d || state.matrix.cols() != d) {
    throw ContractViolation("sector_intensities: state does not belong to sector " + sector.label.to_string());
  }
  OrderIntensities out(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index p = 0; p < d; ++p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i + p < d; ++i) acc += std::norm(state.matrix(i, i + p));
    out[static_cast<std::size_t>(p)] = acc;
  }
  return out;
}

CoherenceSpectrum assemble(const SpinSystem& system, std::span<const SectorContribution> per_sector,
                           SectorCoverage coverage, double time) {
  const auto labels = required_labels(system, coverage);
  std::vector<const SectorContribution*> by_label(labels.size(), nullptr);
  for (const auto& contribution : per_sector) {
    const auto it = std::find(labels.begin(), labels.end(), contribution.label);
    if (it == labels.end()) {
      throw ContractViolation("assemble: unexpected sector " + contribution.label.to_string());
    }
    auto& slot = by_label[static_cast<std::size_t>(it - labels.begin())];
    if (slot) throw ContractViolation("assemble: duplicate sector " + contribution.label.to_string());
    slot = &contribution;
  }
  CoherenceSpectrum out;
  out.time = time;
  out.intensities.assign(order_slots(system.n_spins), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!by_label[i]) throw ContractViolation("assemble: missing sector " + labels[i].to_string());
    const auto& values = by_label[i]->values;
    if (values.size() > out.intensities.size()) throw ContractViolation("assemble: order beyond N");
    const double scale = sector_scale(system, multiplicity_log(system.n_spins, labels[i].total_spin), coverage);
    accumulate(out.intensities, scale, values);
  }
  clamp_negative(out);
  return out;
}

SystemModel::SystemModel(const SpinSystem& system, const EvolveOptions& options)
    : system_(system), options_(options) {
  if (!(options.prune_mass >= 0.0) || !std::isfinite(options.prune_mass))
    throw DomainError("prune mass must be finite and non-negative");
  const bool odd = system.n_spins % 2 == 1;
  switch (options.odd_doubling) {
    case OddDoubling::Auto: coverage_ = odd ? SectorCoverage::PlusDoubled : SectorCoverage::AllParities; break;
    case OddDoubling::On:
      if (!odd) throw DomainError("odd-N parity doubling requested for even N");
      coverage_ = SectorCoverage::PlusDoubled;
      break;
    case OddDoubling::Off: coverage_ = SectorCoverage::AllParities; break;
  }
  const auto labels = required_labels(system, coverage_);

  // Each sector's share of sum_k J_k is conserved: scale * Tr(rho0^2) = scale * sum M^2.
  std::vector<double> mass(labels.size());
  std::vector<double> scales(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    scales[i] = sector_scale(system, multiplicity_log(system.n_spins, labels[i].total_spin), coverage_);
    double m2 = 0.0;
    for (auto m : sector_m_values(system.n_spins, labels[i])) m2 += m.value() * m.value();
    mass[i] = scales[i] * m2;
  }
  std::vector<bool> keep(labels.size(), true);
  if (options.prune_mass > 0.0) {
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mass[a] < mass[b]; });
    for (std::size_t idx : order) {
      if (pruned_mass_ + mass[idx] > options.prune_mass) break;
      pruned_mass_ += mass[idx];
      keep[idx] = false;
      ++pruned_count_;
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (keep[i]) kept.push_back(i);
  }
  std::vector<std::optional<SectorPropagator>> built(kept.size());
  parallel_for(kept.size(), options.threads, [&](std::size_t k) {
    const Sector sector = build_sector(system, labels[kept[k]]);
    built[k].emplace(sector, diagonalize(sector));
  });
  sectors_.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    sectors_.push_back(std::move(*built[k]));
    scales_.push_back(scales[kept[k]]);
  }
}

CoherenceSpectrum SystemModel::reduce(double t, std::span<const std::vector<double>> per_sector) const {
  CoherenceSpectrum out;
  out.time = t;
  out.intensities.assign(order_slots(system_.n_spins), 0.0);
  for (std::size_t s = 0; s < sectors_.size(); ++s) accumulate(out.intensities, scales_[s], per_sector[s]);
  clamp_negative(out);
  return out;
}

CoherenceSpectrum SystemModel::spectrum(double t) const {
  std::vector<std::vector<double>> per_sector(sectors_.size());
  parallel_for(sectors_.size(), options_.threads, [&](std::size_t s) {
    per_sector[s].resize(static_cast<std::size_t>(sectors_[s].dimension()));
    sectors_[s].intensities(t, per_sector[s]);
  });
  return reduce(t, per_sector);
}

std::vector<CoherenceSpectrum> SystemModel::spectra(std::span<const double> times) const {
  std::vector<CoherenceSpectrum> out(times.size());
  parallel_for(times.size(), options_.threads, [&](std::size_t i) {
    CoherenceSpectrum spectrum;
    spectrum.time = times[i];
    spectrum.intensities.assign(order_slots(system_.n_spins), 0.0);
    std::vector<double> scratch;
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
      scratch.resize(static_cast<std::size_t>(sectors_[s].dimension()));
      sectors_[s].intensities(times[i], scratch);
      accumulate(spectrum.intensities, scales_[s], scratch);
    }
    clamp_negative(spectrum);
    out[i] = std::move(spectrum);
  });
  return out;
}

TimeSeries evolve_system(const SpinSystem& system, std::span<const double> grid, const EvolveOptions& options) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw DomainError("evolve_system: non-finite time in grid");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("evolve_system: grid must be strictly increasing");
  }
  const SystemModel model(system, options);
  return TimeSeries{system, std::vector<double>(grid.begin(), grid.end()), model.spectra(grid), model.pruned_mass()};
}

double short_time_check(const SpinSystem& system, double t) {
  if (system.n_spins > 10) {
    throw DomainError("short_time_check builds dense 2^N operators; N = " + std::to_string(system.n_spins) +
                      " exceeds the limit of 10");
  }
  if (!(std::fabs(t) <= 0.5)) throw DomainError("short_time_check: expansion only meaningful for |t| <= 0.5");

  const auto ops = collective_operators(system.n_spins);
  const Eigen::MatrixXd& up = ops.raising;
  const Eigen::MatrixXd& down = ops.lowering;
  const Eigen::MatrixXd& z = ops.iz;
  const Eigen::MatrixXd up2 = up * up;
  const Eigen::MatrixXd down2 = down * down;
  const Eigen::MatrixXd z2 = z * z;

  const Eigen::MatrixXd a = 0.5 * (up2 - down2);
  // The I_z I- I+ term enters with a plus sign; that is what [H, A] evaluates to.
  const Eigen::MatrixXd b = 2.0 * z2 - z + 2.0 * z * down * up;
  const Eigen::MatrixXd c = -0.5 * (3.0 * down2 + 9.0 * up2 - 2.0 * z * down2 - 14.0 * z * up2 + 2.0 * down2 * down * up -
                                    2.0 * down * up2 * up - 4.0 * z2 * down2 + 4.0 * z2 * up2);

  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  const Eigen::MatrixXcd series = z.cast<cd>() - i * t * a.cast<cd>() - (0.5 * t * t) * b.cast<cd>() +
                                  (i * (t * t * t / 6.0)) * c.cast<cd>();
  const DenseOracle oracle(system);
  return (oracle.state(t).matrix - series).cwiseAbs().maxCoeff();
}

}  // namespace mqnmr
