#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mqnmr/coherence.hpp"
#include "mqnmr/errors.hpp"
#include "mqnmr/io.hpp"
#include "mqnmr/oracles.hpp"
#include "mqnmr/profile.hpp"

namespace py = pybind11;
using namespace mqnmr;

namespace {

OddDoubling parse_doubling(const std::string& mode) {
  if (mode == "auto") return OddDoubling::Auto;
  if (mode == "on") return OddDoubling::On;
  if (mode == "off") return OddDoubling::Off;
  throw DomainError("odd_doubling must be 'auto', 'on' or 'off'");
}

EvolveOptions make_options(int threads, const std::string& odd_doubling, double prune) {
  EvolveOptions o;
  o.threads = threads;
  o.odd_doubling = parse_doubling(odd_doubling);
  o.prune_mass = prune;
  return o;
}

// Rows are time points, columns are orders k = 0, 2, 4, ...
py::array_t<double> to_array(const std::vector<CoherenceSpectrum>& spectra, std::size_t orders) {
  py::array_t<double> out({spectra.size(), orders});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < spectra.size(); ++i)
    for (std::size_t p = 0; p < orders; ++p) view(i, p) = spectra[i].intensities[p];
  return out;
}

py::dict params_dict(const ProfileParameters& p) {
  py::dict d;
  d["A1"] = p.a_cap_1;
  d["A2"] = p.a_cap_2;
  d["alpha1"] = p.alpha_1;
  d["alpha2"] = p.alpha_2;
  d["a1"] = p.a_1;
  d["a2"] = p.a_2;
  return d;
}

ProfileParameters params_from(const py::dict& d) {
  return {d["A1"].cast<double>(), d["A2"].cast<double>(), d["alpha1"].cast<double>(),
          d["alpha2"].cast<double>(), d["a1"].cast<double>(), d["a2"].cast<double>()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MQ NMR coherence dynamics of N spins with uniform dipolar coupling";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  py::class_<SpinSystem>(m, "SpinSystem")
      .def(py::init<int, double>(), py::arg("n_spins"), py::arg("coupling") = 1.0)
      .def_readonly("n_spins", &SpinSystem::n_spins)
      .def_readonly("coupling", &SpinSystem::coupling)
      .def("__repr__", [](const SpinSystem& s) {
        return "SpinSystem(n_spins=" + std::to_string(s.n_spins) + ", coupling=" + std::to_string(s.coupling) + ")";
      });

  m.def("sectors", [](int n) {
        std::vector<std::pair<double, std::string>> out;
        for (const auto& l : enumerate_sectors(SpinSystem(n)))
          out.emplace_back(l.total_spin.value(), l.parity == Parity::Plus ? "+" : "-");
        return out;
      }, py::arg("n_spins"), "(S, parity) of every non-empty subblock, in evaluation order.");
  m.def("multiplicity_log", [](int n, double s) { return multiplicity_log(n, HalfInt::from_twice(static_cast<int>(std::lround(2 * s)))); },
        py::arg("n_spins"), py::arg("total_spin"));
  m.def("sector_eigenvalues", [](int n, double s, const std::string& parity) {
        const SectorLabel label{HalfInt::from_twice(static_cast<int>(std::lround(2 * s))),
                                parity == "-" ? Parity::Minus : Parity::Plus};
        return Eigen::VectorXd(diagonalize(build_sector(SpinSystem(n), label)).eigenvalues);
      }, py::arg("n_spins"), py::arg("total_spin"), py::arg("parity") = "+");
  m.def("verify_dimension_identity", &verify_dimension_identity, py::arg("n_spins"));

  m.def("evolve",
        [](int n, std::vector<double> times, double coupling, int threads, const std::string& odd_doubling, double prune) {
          std::vector<CoherenceSpectrum> spectra;
          {
            py::gil_scoped_release release;
            spectra = evolve_system(SpinSystem(n, coupling), times, make_options(threads, odd_doubling, prune)).spectra;
          }
          return to_array(spectra, static_cast<std::size_t>(n / 2 + 1));
        },
        py::arg("n_spins"), py::arg("times"), py::arg("coupling") = 1.0, py::arg("threads") = 0,
        py::arg("odd_doubling") = "auto", py::arg("prune") = 1e-15,
        "J_k(t) as an array of shape (len(times), N//2 + 1); column p is order k = 2p.");

  m.def("dense_spectrum", [](int n, double t) { return dense_brute_force(SpinSystem(n), t).intensities; },
        py::arg("n_spins"), py::arg("t"), "Brute-force product-basis reference, N <= 12.");
  m.def("five_spin_closed_form", [](double t) { return five_spin_closed_form(t).intensities; }, py::arg("t"));
  m.def("short_time_check", [](int n, double t) { return short_time_check(SpinSystem(n), t); },
        py::arg("n_spins"), py::arg("t"));

  m.def("time_average",
        [](int n, double t0, int k0, double period, double coupling, int threads, double tolerance) {
          AverageOptions options;
          options.tolerance = tolerance;
          options.evolve.threads = threads;
          py::gil_scoped_release release;
          const auto p = time_average(SpinSystem(n, coupling), AveragingWindow{t0, k0, period}, options);
          return std::make_pair(p.averaged, p.intervals);
        },
        py::arg("n_spins"), py::arg("t0") = 31.0, py::arg("k0") = 2,
        py::arg("period") = 4.0 * std::numbers::pi / std::numbers::sqrt3, py::arg("coupling") = 1.0,
        py::arg("threads") = 0, py::arg("tolerance") = 1e-7,
        "Time-averaged J_k by half-order, and the number of Simpson intervals used.");

  m.def("fit_profile",
        [](const std::vector<double>& by_half_order) {
          const auto fit = fit_profile(split_families(by_half_order), by_half_order.at(0));
          py::dict out;
          out["joint"] = params_dict(fit.joint);
          out["joint_per_order"] = params_dict(fit.joint.per_order());
          out["staged"] = params_dict(fit.staged);
          out["staged_per_order"] = params_dict(fit.staged.per_order());
          out["free_gamma1"] = params_dict(fit.free_gamma1);
          out["normalization_residual"] = normalization_residual(fit.joint, fit.j_bar_zero);
          out["rms_gamma1"] = fit.rms_gamma1;
          out["rms_gamma2"] = fit.rms_gamma2;
          return out;
        },
        py::arg("averaged"), "Two-family fit; parameters use the half-order n = k/2 unless marked per_order.");
  m.def("profile_model",
        [](const py::dict& params, int half_order) {
          const auto p = params_from(params);
          return half_order % 2 ? gamma1_model(p, half_order) : gamma2_model(p, half_order);
        },
        py::arg("params"), py::arg("half_order"));
  m.def("normalization_residual",
        [](const py::dict& params, double j0) { return normalization_residual(params_from(params), j0); },
        py::arg("params"), py::arg("j_bar_zero"));
  m.def("read_profile", [](const std::string& path) {
        const auto p = read_profile_file(path);
        return py::make_tuple(p.system.n_spins, p.averaged);
      }, py::arg("path"));
}
