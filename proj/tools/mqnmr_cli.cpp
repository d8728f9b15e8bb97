// mqnmr: MQ NMR coherence dynamics of N equivalent spins with uniform coupling.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mqnmr/coherence.hpp"
#include "mqnmr/errors.hpp"
#include "mqnmr/io.hpp"
#include "mqnmr/oracles.hpp"
#include "mqnmr/profile.hpp"

using namespace mqnmr;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kNumerical = 4 };

struct Config {
  int spins = 0;
  double coupling = 1.0;
  double t_start = 0.0;
  double t_end = 10.0;
  double t_step = 0.1;
  std::vector<double> times;
  double t0 = 31.0;
  int k0 = 2;
  double period = 4.0 * std::numbers::pi / std::numbers::sqrt3;
  std::string input;
  std::string output = "-";
  std::string format = "csv";
  int threads = 0;
  std::string odd_doubling = "auto";
  double prune = 1e-15;
};

EvolveOptions evolve_options(const Config& c) {
  EvolveOptions o;
  o.threads = c.threads;
  o.prune_mass = c.prune;
  if (c.odd_doubling == "on") o.odd_doubling = OddDoubling::On;
  else if (c.odd_doubling == "off") o.odd_doubling = OddDoubling::Off;
  return o;
}

std::vector<double> grid(const Config& c) {
  if (!c.times.empty()) return c.times;
  if (!(c.t_step > 0.0) || !(c.t_end >= c.t_start)) throw DomainError("need t-step > 0 and t-end >= t-start");
  const auto n = static_cast<std::size_t>(std::floor((c.t_end - c.t_start) / c.t_step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = c.t_start + static_cast<double>(i) * c.t_step;
  return out;
}

// Writes to a file or stdout ("-"); throws std::ios_base::failure on I/O trouble.
template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  write(os);
  os.flush();
  if (!os) throw std::ios_base::failure("write to " + path + " failed");
}

int run_evolve(const Config& c) {
  const SpinSystem system(c.spins, c.coupling);
  const auto series = evolve_system(system, grid(c), evolve_options(c));
  const auto format = parse_format(c.format);
  emit(c.output, [&](std::ostream& os) {
    if (format == Format::Csv) write_time_series_csv(os, series);
    else write_time_series_json(os, series);
  });
  return kOk;
}

int run_profile(const Config& c) {
  const SpinSystem system(c.spins, c.coupling);
  AverageOptions options;
  options.evolve = evolve_options(c);
  const auto profile = time_average(system, AveragingWindow{c.t0, c.k0, c.period}, options);
  const auto format = parse_format(c.format);
  emit(c.output, [&](std::ostream& os) {
    if (format == Format::Csv) write_profile_csv(os, profile);
    else write_profile_json(os, profile);
  });
  return kOk;
}

int run_fit(const Config& c) {
  if (c.input.empty()) throw DomainError("fit needs --input");
  const auto profile = read_profile_file(c.input);
  const auto fit = fit_profile(split_families(profile), profile.at(0));
  const auto format = parse_format(c.format);
  emit(c.output, [&](std::ostream& os) {
    if (format == Format::Csv) write_fit_csv(os, fit, profile.system.n_spins);
    else write_fit_json(os, fit, profile.system.n_spins);
  });
  return kOk;
}

struct Row {
  std::string name;
  bool pass;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

int run_verify(const Config& c) {
  std::vector<Row> rows;
  const int n = c.spins;
  if (n < 1) throw DomainError("--spins must be >= 1");

  const auto dim = dimension_report(n);
  rows.push_back({"dimension identity", dim.holds,
                  dim.exact_path ? "exact" : "log-space rel err " + sci(dim.log_relative_error)});

  if (n >= 2) {
    const SpinSystem system(n, c.coupling);
    if (n % 2 == 0 && n <= 60) {
      const auto id = check_binomial_identities(n);
      rows.push_back({"binomial identities", id.all(), "exact"});
    }

    auto options = evolve_options(c);
    options.prune_mass = 0.0;
    const SystemModel model(system, options);

    double sym = 0.0, smallest = std::numeric_limits<double>::infinity();
    for (const auto& sector : model.sectors()) {
      const auto& ev = sector.decomposition().eigenvalues;
      const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        sym = std::max(sym, std::fabs(ev(i) + ev(ev.size() - 1 - i)) / scale);
        if (ev(i) > 1e-8) smallest = std::min(smallest, ev(i));
      }
    }
    rows.push_back({"spectrum symmetric", sym < 1e-10, "max " + sci(sym)});
    if (n >= 3) {
      const double gap = std::fabs(smallest - std::sqrt(3.0) / 2.0);
      rows.push_back({"min positive eigenvalue sqrt(3)/2", gap < 1e-10, "dev " + sci(gap)});
    }

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> pick(0.0, 50.0);
    std::vector<double> times(10);
    for (auto& t : times) t = pick(rng);
    std::sort(times.begin(), times.end());
    const auto spectra = model.spectra(times);
    double sum = 0.0;
    for (const auto& s : spectra) sum = std::max(sum, std::fabs(s.total() - 1.0));
    rows.push_back({"sum rule", sum < 1e-9, "max |sum-1| " + sci(sum)});

    if (n == 5) {
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const double t = 10.0 * i / 99.0;
        const auto a = model.spectrum(t), b = five_spin_closed_form(t);
        for (int k = 0; k <= 4; k += 2) worst = std::max(worst, std::fabs(a.at(k) - b.at(k)));
      }
      rows.push_back({"five-spin closed form", worst < 1e-10, "max " + sci(worst)});
    }
    if (n <= 10) {
      const DenseOracle oracle(system);
      double worst = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto b = oracle.spectrum(times[i]);
        for (int k = 0; k <= n; k += 2) worst = std::max(worst, std::fabs(spectra[i].at(k) - b.at(k)));
      }
      rows.push_back({"dense oracle", worst < 1e-10, "max " + sci(worst)});
      const double ratio = short_time_check(system, 0.1) / short_time_check(system, 0.05);
      rows.push_back({"short-time t^4 scaling", ratio >= 12.0 && ratio <= 20.0, "ratio " + std::to_string(ratio)});
    }
  }

  bool all = true;
  std::printf("%-36s %-6s %s\n", "check", "result", "detail");
  for (const auto& r : rows) {
    all = all && r.pass;
    std::printf("%-36s %-6s %s\n", r.name.c_str(), r.pass ? "pass" : "FAIL", r.detail.c_str());
  }
  return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MQ NMR coherence dynamics for N spins with uniform dipolar coupling"};
  app.require_subcommand(1);
  Config c;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("-n,--spins", c.spins, "number of spins")->required()->check(CLI::Range(1, 100000));
    sub->add_option("--coupling", c.coupling, "coupling constant D (time is D*tau)");
    sub->add_option("--threads", c.threads, "worker threads, 0 = MQNMR_THREADS or all cores")->envname("MQNMR_THREADS");
    sub->add_option("--odd-doubling", c.odd_doubling, "use one parity block twice for odd N")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    sub->add_option("--prune", c.prune, "mass budget of skipped sectors (0 keeps all)");
  };
  const auto output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", c.output, "output path, - for stdout");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* verify = app.add_subcommand("verify", "run internal consistency checks for N spins");
  common(verify);

  auto* evolve = app.add_subcommand("evolve", "J_k(t) on a time grid");
  common(evolve);
  output(evolve);
  evolve->add_option("--t-start", c.t_start);
  evolve->add_option("--t-end", c.t_end);
  evolve->add_option("--t-step", c.t_step);
  evolve->add_option("--times", c.times, "explicit increasing times (overrides the range)")->delimiter(',');

  auto* profile = app.add_subcommand("profile", "time-averaged profile over [t0, t0 + k0*period]");
  common(profile);
  output(profile);
  profile->add_option("--t0", c.t0);
  profile->add_option("--k0", c.k0);
  profile->add_option("--period", c.period);

  auto* fit = app.add_subcommand("fit", "fit the two-family model to a stored profile");
  output(fit);
  fit->add_option("-i,--input", c.input, "profile file (csv or json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) return run_verify(c);
    if (*evolve) return run_evolve(c);
    if (*profile) return run_profile(c);
    if (*fit) return run_fit(c);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
