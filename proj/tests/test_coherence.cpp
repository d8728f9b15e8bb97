#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mqnmr/coherence.hpp"
#include "mqnmr/errors.hpp"

using namespace mqnmr;

namespace {

std::vector<SectorContribution> contributions(const SpinSystem& system, double t, bool plus_only) {
  std::vector<SectorContribution> out;
  for (const auto& label : enumerate_sectors(system)) {
    if (plus_only && label.parity != Parity::Plus) continue;
    const auto sector = build_sector(system, label);
    const auto state = propagate(diagonalize(sector), initial_state(sector), t);
    out.push_back({label, sector_intensities(state, sector)});
  }
  return out;
}

}  // namespace

TEST_CASE("spectrum at t = 0 is pure zero-quantum") {
  for (int n : {2, 5, 8, 51}) {
    const SpinSystem system(n);
    const auto spec = assemble(system, contributions(system, 0.0, false), SectorCoverage::AllParities, 0.0);
    CHECK(spec.at(0) == doctest::Approx(1.0).epsilon(1e-13));
    for (int k = 1; k <= spec.max_order(); ++k) CHECK(std::fabs(spec.at(k)) < 1e-15);
  }
}

TEST_CASE("five-spin four-quantum peak") {
  const SpinSystem five(5);
  const double t = std::numbers::pi / std::sqrt(7.0);
  const auto spec = SystemModel(five).spectrum(t);
  CHECK(spec.at(4) == doctest::Approx(144.0 / 2401.0).epsilon(1e-12));
  CHECK(spec.at(-4) == spec.at(4));
  CHECK(spec.max_order() == 4);
}

TEST_CASE("spectrum accessors") {
  CoherenceSpectrum s;
  s.intensities = {0.5, 0.2, 0.05};
  CHECK(s.at(0) == 0.5);
  CHECK(s.at(2) == 0.2);
  CHECK(s.at(-2) == 0.2);
  CHECK(s.at(3) == 0.0);
  CHECK(s.at(6) == 0.0);
  CHECK(s.at(-100) == 0.0);
  CHECK(s.total() == doctest::Approx(1.0));
}

TEST_CASE("sum rule, evenness and support") {
  std::mt19937 rng(314);
  std::uniform_real_distribution<double> pick_t(0.0, 50.0);
  for (int n : {3, 4, 9, 20, 51}) {
    const SpinSystem system(n);
    const SystemModel model(system);
    for (int i = 0; i < 10; ++i) {
      const auto spec = model.spectrum(pick_t(rng));
      CHECK(std::fabs(spec.total() - 1.0) < 1e-9);
      // Support: |k| <= 2 floor(N/2) with even k only.
      CHECK(spec.max_order() <= 2 * (n / 2));
      for (double v : spec.intensities) CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("odd doubling matches the full parity sum") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pick_t(0.0, 30.0);
  for (int n : {3, 5, 7, 21}) {
    const SpinSystem system(n);
    EvolveOptions on, off;
    on.odd_doubling = OddDoubling::On;
    off.odd_doubling = OddDoubling::Off;
    on.prune_mass = off.prune_mass = 0.0;
    const SystemModel doubled(system, on), full(system, off);
    CHECK(doubled.coverage() == SectorCoverage::PlusDoubled);
    CHECK(full.coverage() == SectorCoverage::AllParities);
    for (int i = 0; i < 5; ++i) {
      const double t = pick_t(rng);
      const auto a = doubled.spectrum(t), b = full.spectrum(t);
      REQUIRE(a.intensities.size() == b.intensities.size());
      for (std::size_t p = 0; p < a.intensities.size(); ++p) CHECK(std::fabs(a.intensities[p] - b.intensities[p]) < 1e-12);
    }
  }
  CHECK(SystemModel(SpinSystem(7)).coverage() == SectorCoverage::PlusDoubled);
  CHECK(SystemModel(SpinSystem(8)).coverage() == SectorCoverage::AllParities);
  EvolveOptions on;
  on.odd_doubling = OddDoubling::On;
  CHECK_THROWS_AS(SystemModel(SpinSystem(8), on), DomainError);
}

TEST_CASE("model spectrum and batched spectra agree bit for bit") {
  const SpinSystem system(41);
  EvolveOptions serial, threaded;
  serial.threads = 1;
  threaded.threads = 4;
  const SystemModel a(system, serial), b(system, threaded);
  const std::vector<double> times{0.0, 0.3, 2.0, 17.5, 40.0};
  const auto batch_a = a.spectra(times);
  const auto batch_b = b.spectra(times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto single = b.spectrum(times[i]);
    CHECK(single.intensities == batch_a[i].intensities);
    CHECK(single.intensities == batch_b[i].intensities);
    CHECK(batch_a[i].time == times[i]);
  }
}

TEST_CASE("pruning stays within budget") {
  const SpinSystem system(201);
  const SystemModel pruned(system);
  EvolveOptions keep;
  keep.prune_mass = 0.0;
  const SystemModel full(system, keep);
  CHECK(pruned.pruned_count() > 0);
  CHECK(pruned.pruned_mass() <= 1e-15);
  CHECK(full.pruned_count() == 0);
  CHECK(full.pruned_mass() == 0.0);
  const auto a = pruned.spectrum(7.0), b = full.spectrum(7.0);
  for (std::size_t p = 0; p < a.intensities.size(); ++p) CHECK(std::fabs(a.intensities[p] - b.intensities[p]) < 1e-14);
  EvolveOptions bad;
  bad.prune_mass = -1.0;
  CHECK_THROWS_AS(SystemModel(system, bad), DomainError);
}

TEST_CASE("coupling does not change dimensionless dynamics") {
  const SpinSystem unit(9), scaled(9, -3.5);
  const auto a = SystemModel(unit).spectrum(4.2), b = SystemModel(scaled).spectrum(4.2);
  for (std::size_t p = 0; p < a.intensities.size(); ++p) CHECK(std::fabs(a.intensities[p] - b.intensities[p]) < 1e-12);
}

TEST_CASE("assemble rejects inconsistent sector sets") {
  const SpinSystem system(5);
  auto all = contributions(system, 1.0, false);
  SUBCASE("missing") {
    all.pop_back();
    CHECK_THROWS_AS(assemble(system, all), ContractViolation);
  }
  SUBCASE("duplicated") {
    all.back() = all.front();
    CHECK_THROWS_AS(assemble(system, all), ContractViolation);
  }
  SUBCASE("minus under doubling") {
    CHECK_THROWS_AS(assemble(system, all, SectorCoverage::PlusDoubled), ContractViolation);
  }
  SUBCASE("doubling on even N") {
    const SpinSystem even(4);
    CHECK_THROWS_AS(assemble(even, contributions(even, 1.0, true), SectorCoverage::PlusDoubled), ContractViolation);
  }
}

TEST_CASE("evolve_system validates the grid") {
  const SpinSystem system(5);
  const std::vector<double> good{0.0, 0.5, 1.0};
  const auto series = evolve_system(system, good);
  CHECK(series.spectra.size() == 3);
  CHECK(series.grid == good);
  const std::vector<double> unsorted{0.0, 1.0, 0.5};
  CHECK_THROWS_AS(evolve_system(system, unsorted), DomainError);
  const std::vector<double> repeated{0.0, 0.0};
  CHECK_THROWS_AS(evolve_system(system, repeated), DomainError);
  const std::vector<double> nan{0.0, std::nan("")};
  CHECK_THROWS_AS(evolve_system(system, nan), DomainError);
  CHECK(evolve_system(system, std::vector<double>{}).spectra.empty());
}

TEST_CASE("short-time expansion error scales as h^4") {
  for (int n : {3, 5}) {
    const SpinSystem system(n);
    const double coarse = short_time_check(system, 0.1);
    const double fine = short_time_check(system, 0.05);
    CHECK(fine < 1e-4);
    const double ratio = coarse / fine;
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
  CHECK(short_time_check(SpinSystem(4), 0.0) < 1e-13);
  CHECK_THROWS_AS(short_time_check(SpinSystem(11), 0.1), DomainError);
  CHECK_THROWS_AS(short_time_check(SpinSystem(5), 0.6), DomainError);
}
