#include "mqnmr/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "mqnmr/errors.hpp"
#include "mqnmr/least_squares.hpp"

namespace mqnmr {

double AveragedProfile::at(int order) const {
  if (order % 2 != 0) return 0.0;
  const auto p = static_cast<std::size_t>(std::abs(order) / 2);
  return p < averaged.size() ? averaged[p] : 0.0;
}

double AveragedProfile::total() const {
  if (averaged.empty()) return 0.0;
  double tail = 0.0;
  for (std::size_t p = averaged.size() - 1; p >= 1; --p) tail += averaged[p];
  return averaged[0] + 2.0 * tail;
}

namespace {

std::vector<double> midpoints(double start, double h, std::size_t intervals) {
  std::vector<double> t(intervals);
  for (std::size_t i = 0; i < intervals; ++i) t[i] = start + (static_cast<double>(i) + 0.5) * h;
  return t;
}

}  // namespace

AveragedProfile time_average(const SpinSystem& system, const AveragingWindow& window, const AverageOptions& options) {
  const SystemModel model(system, options.evolve);
  return time_average(model, window, options);
}

AveragedProfile time_average(const SystemModel& model, const AveragingWindow& window, const AverageOptions& options) {
  if (!(window.t0 >= 0.0) || window.k0 < 1 || !(window.period > 0.0)) {
    throw DomainError("time_average: need t0 >= 0, k0 >= 1, period > 0");
  }
  if (!(options.initial_step > 0.0)) throw DomainError("time_average: initial_step must be positive");
  const double length = window.k0 * window.period;
  std::size_t n = 2 * static_cast<std::size_t>(std::ceil(length / (2.0 * options.initial_step)));
  double h = length / static_cast<double>(n);
  const std::size_t orders = static_cast<std::size_t>(model.system().n_spins / 2 + 1);

  std::vector<double> nodes(n + 1);
  for (std::size_t i = 0; i <= n; ++i) nodes[i] = window.t0 + static_cast<double>(i) * h;
  nodes[n] = window.t0 + length;
  const auto initial = model.spectra(nodes);

  // Trapezoid sums at step h and 2h; Simpson = (4 T_h - T_2h) / 3.
  std::vector<double> trap(orders, 0.0);
  std::vector<double> trap_coarse(orders, 0.0);
  for (std::size_t p = 0; p < orders; ++p) {
    double all = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      all += initial[i].intensities[p];
      if (i % 2 == 0) even += initial[i].intensities[p];
    }
    const double ends = 0.5 * (initial[0].intensities[p] + initial[n].intensities[p]);
    trap[p] = h * (all + ends);
    trap_coarse[p] = 2.0 * h * (even + ends);
  }
  std::vector<double> simpson(orders);
  for (std::size_t p = 0; p < orders; ++p) simpson[p] = (4.0 * trap[p] - trap_coarse[p]) / 3.0;

  for (int halving = 1; halving <= options.max_halvings; ++halving) {
    const auto mids = midpoints(window.t0, h, n);
    const auto values = model.spectra(mids);
    double change = 0.0;
    for (std::size_t p = 0; p < orders; ++p) {
      double mid_sum = 0.0;
      for (const auto& s : values) mid_sum += s.intensities[p];
      const double refined_trap = 0.5 * trap[p] + 0.5 * h * mid_sum;
      const double refined = (4.0 * refined_trap - trap[p]) / 3.0;
      change = std::max(change, std::fabs(refined - simpson[p]) / length);
      trap[p] = refined_trap;
      simpson[p] = refined;
    }
    n *= 2;
    h *= 0.5;
    if (change < options.tolerance) {
      AveragedProfile out{model.system()};
      out.t0 = window.t0;
      out.k0 = window.k0;
      out.period = window.period;
      out.averaged.resize(orders);
      for (std::size_t p = 0; p < orders; ++p) out.averaged[p] = std::max(0.0, simpson[p] / length);
      out.intervals = n;
      out.last_change = change;
      out.pruned_mass = model.pruned_mass();
      return out;
    }
  }
  throw NumericalError("time_average: Simpson quadrature not converged after " + std::to_string(options.max_halvings) +
                       " halvings (N=" + std::to_string(model.system().n_spins) + ")");
}

FamilySplit split_families(const std::vector<double>& by_half_order) {
  if (by_half_order.size() < 3) throw DomainError("split_families: profile must reach order 4");
  FamilySplit split;
  split.zero_order = by_half_order[0];
  for (std::size_t p = 1; p < by_half_order.size(); ++p) {
    const FamilyPoint point{static_cast<int>(2 * p), by_half_order[p]};
    (p % 2 == 1 ? split.gamma1 : split.gamma2).push_back(point);
  }
  return split;
}

FamilySplit split_families(const AveragedProfile& profile) { return split_families(profile.averaged); }

ProfileParameters ProfileParameters::per_order() const {
  return {a_cap_1, a_cap_2, alpha_1 / 2.0, alpha_2 / 2.0, a_1 / 2.0, a_2 / 4.0};
}

ProfileParameters ProfileParameters::from_per_order(const ProfileParameters& q) {
  return {q.a_cap_1, q.a_cap_2, 2.0 * q.alpha_1, 2.0 * q.alpha_2, 2.0 * q.a_1, 4.0 * q.a_2};
}

double gamma1_model(const ProfileParameters& p, double n) {
  n = std::fabs(n);
  return p.a_cap_1 * (1.0 + 2.0 * p.a_1 * n + 4.0 * p.a_2 * n * n) * std::exp(-2.0 * p.alpha_1 * n);
}

double gamma2_model(const ProfileParameters& p, double n) {
  return p.a_cap_2 * std::exp(-2.0 * p.alpha_2 * std::fabs(n));
}

namespace {

// Sum over odd n >= 1 of gamma1, doubled for +-n, per unit A1.
double gamma1_unit_mass(double alpha1, double a1, double a2) {
  const double x = 2.0 * alpha1;
  const double sh = std::sinh(x);
  return (sh * sh + a1 * std::sinh(2.0 * x) + 6.0 * a2 + 2.0 * a2 * std::cosh(2.0 * x)) / (sh * sh * sh);
}

// Sum over even n >= 2 of gamma2, doubled, per unit A2.
double gamma2_unit_mass(double alpha2) { return 2.0 / std::expm1(4.0 * alpha2); }

}  // namespace

double family_mass(const ProfileParameters& p) {
  return p.a_cap_2 * gamma2_unit_mass(p.alpha_2) + p.a_cap_1 * gamma1_unit_mass(p.alpha_1, p.a_1, p.a_2);
}

double normalization_residual(const ProfileParameters& p, double j_bar_zero) {
  double mass = 0.0;
  if (p.a_cap_2 != 0.0) mass += p.a_cap_2 * gamma2_unit_mass(p.alpha_2);
  if (p.a_cap_1 != 0.0) mass += p.a_cap_1 * gamma1_unit_mass(p.alpha_1, p.a_1, p.a_2);
  return j_bar_zero + mass - 1.0;
}

namespace {

struct Points {
  Eigen::VectorXd n;
  Eigen::VectorXd value;
};

Points usable(const std::vector<FamilyPoint>& family, const FitOptions& options, const char* name) {
  std::vector<std::pair<double, double>> kept;
  for (const auto& pt : family) {
    if (pt.value > options.noise_floor) kept.emplace_back(0.5 * pt.order, pt.value);
  }
  if (static_cast<int>(kept.size()) < options.min_points) {
    throw FitError(std::string("fit_profile: family ") + name + " has " + std::to_string(kept.size()) +
                   " points above the noise floor, need at least " + std::to_string(options.min_points));
  }
  Points out{Eigen::VectorXd(static_cast<Eigen::Index>(kept.size())),
             Eigen::VectorXd(static_cast<Eigen::Index>(kept.size()))};
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.n(static_cast<Eigen::Index>(i)) = kept[i].first;
    out.value(static_cast<Eigen::Index>(i)) = kept[i].second;
  }
  return out;
}

// ln J = ln A - 2 alpha n by least squares; weighted with J^2 this approximates
// the linear-intensity objective, unweighted it follows the tail.
std::pair<double, double> log_linear_fit(const Points& pts, bool weighted) {
  const Eigen::VectorXd w = weighted ? Eigen::VectorXd(pts.value.cwiseAbs()) : Eigen::VectorXd::Ones(pts.n.size());
  Eigen::MatrixXd design(pts.n.size(), 2);
  design.col(0) = w;
  design.col(1) = -2.0 * pts.n.cwiseProduct(w);
  const Eigen::VectorXd logs = pts.value.array().log().matrix().cwiseProduct(w);
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(logs);
  return {std::exp(coef(0)), coef(1)};
}

// Lowest-cost LM run over several starting points.
LeastSquaresResult best_of(const ResidualFunction& residual, const std::vector<Eigen::VectorXd>& starts) {
  LeastSquaresOptions options;
  options.max_iterations = 2000;
  LeastSquaresResult best;
  best.cost = INFINITY;
  for (const auto& x0 : starts) {
    auto r = levenberg_marquardt(residual, x0, options);
    if (r.cost < best.cost) best = std::move(r);
  }
  return best;
}

double amplitude1_from_constraint(double j0, double a2_cap, double alpha2, double alpha1, double a1, double a2) {
  return (1.0 - j0 - a2_cap * gamma2_unit_mass(alpha2)) / gamma1_unit_mass(alpha1, a1, a2);
}

double amplitude2_from_constraint(double j0, double a1_cap, double alpha1, double a1, double a2, double alpha2) {
  return (1.0 - j0 - a1_cap * gamma1_unit_mass(alpha1, a1, a2)) / gamma2_unit_mass(alpha2);
}

void check_parameters(const ProfileParameters& p, const char* stage) {
  std::ostringstream diag;
  diag << stage << ": A1=" << p.a_cap_1 << " A2=" << p.a_cap_2 << " alpha1=" << p.alpha_1 << " alpha2=" << p.alpha_2
       << " a1=" << p.a_1 << " a2=" << p.a_2;
  if (!(p.alpha_1 > 0.0) || !(p.alpha_2 > 0.0)) throw FitError("fit_profile: non-positive decay rate (" + diag.str() + ")");
  if (!(p.a_cap_1 > 0.0) || !(p.a_cap_2 > 0.0)) throw FitError("fit_profile: non-positive amplitude (" + diag.str() + ")");
}

double rms(const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / static_cast<double>(r.size())); }

}  // namespace

ProfileFit fit_profile(const FamilySplit& split, double j_bar_zero, const FitOptions& options) {
  const Points g1 = usable(split.gamma1, options, "gamma1");
  const Points g2 = usable(split.gamma2, options, "gamma2");

  auto gamma1_residual = [&](const ProfileParameters& p) {
    Eigen::VectorXd r(g1.n.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = gamma1_model(p, g1.n(i)) - g1.value(i);
    return r;
  };
  auto gamma2_residual = [&](const ProfileParameters& p) {
    Eigen::VectorXd r(g2.n.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = gamma2_model(p, g2.n(i)) - g2.value(i);
    return r;
  };

  ProfileFit fit;
  fit.j_bar_zero = j_bar_zero;
  fit.points_gamma1 = static_cast<int>(g1.n.size());
  fit.points_gamma2 = static_cast<int>(g2.n.size());

  // Step 1: gamma2 alone, log-linear start then linear-intensity refinement.
  ProfileParameters staged;
  {
    std::vector<Eigen::VectorXd> starts;
    for (bool weighted : {true, false}) {
      const auto [amp, alpha] = log_linear_fit(g2, weighted);
      starts.push_back(Eigen::Vector2d(amp, alpha));
    }
    const auto result = best_of(
        [&](const Eigen::VectorXd& x) {
          ProfileParameters p;
          p.a_cap_2 = x(0);
          p.alpha_2 = x(1);
          return gamma2_residual(p);
        },
        starts);
    staged.a_cap_2 = result.x(0);
    staged.alpha_2 = result.x(1);
  }

  // Free gamma1 fit (A1, alpha1, a1, a2) from a pure-exponential start.
  {
    std::vector<Eigen::VectorXd> starts;
    for (bool weighted : {true, false}) {
      const auto [amp, alpha] = log_linear_fit(g1, weighted);
      for (double a1 : {0.0, -0.2, 0.2})
        for (double a2 : {0.0, 0.02}) starts.push_back(Eigen::Vector4d(amp, alpha, a1, a2));
    }
    const auto result = best_of(
        [&](const Eigen::VectorXd& x) {
          ProfileParameters p;
          p.a_cap_1 = x(0);
          p.alpha_1 = x(1);
          p.a_1 = x(2);
          p.a_2 = x(3);
          return gamma1_residual(p);
        },
        starts);
    fit.free_gamma1 = {result.x(0), 0.0, result.x(1), 0.0, result.x(2), result.x(3)};
  }

  // Steps 2-3: A1 tied to (A2, alpha2) by normalization; fit (alpha1, a1, a2).
  {
    auto unpack = [&](const Eigen::VectorXd& x) {
      ProfileParameters p = staged;
      p.alpha_1 = x(0);
      p.a_1 = x(1);
      p.a_2 = x(2);
      p.a_cap_1 = amplitude1_from_constraint(j_bar_zero, p.a_cap_2, p.alpha_2, p.alpha_1, p.a_1, p.a_2);
      return p;
    };
    const auto result = best_of([&](const Eigen::VectorXd& x) { return gamma1_residual(unpack(x)); },
                                {Eigen::Vector3d(fit.free_gamma1.alpha_1, fit.free_gamma1.a_1, fit.free_gamma1.a_2)});
    staged = unpack(result.x);
  }
  fit.staged = staged;

  // Joint: (A1, alpha1, a1, a2, alpha2) free, A2 from normalization, both families at once.
  {
    auto unpack = [&](const Eigen::VectorXd& x) {
      ProfileParameters p;
      p.a_cap_1 = x(0);
      p.alpha_1 = x(1);
      p.a_1 = x(2);
      p.a_2 = x(3);
      p.alpha_2 = x(4);
      p.a_cap_2 = amplitude2_from_constraint(j_bar_zero, p.a_cap_1, p.alpha_1, p.a_1, p.a_2, p.alpha_2);
      return p;
    };
    auto residual = [&](const Eigen::VectorXd& x) {
      const auto p = unpack(x);
      Eigen::VectorXd r(g1.n.size() + g2.n.size());
      r << gamma1_residual(p), gamma2_residual(p);
      return r;
    };
    Eigen::VectorXd x0(5);
    x0 << staged.a_cap_1, staged.alpha_1, staged.a_1, staged.a_2, staged.alpha_2;
    const auto result = best_of(residual, {x0});
    fit.joint = unpack(result.x);
  }
  check_parameters(fit.staged, "staged");
  check_parameters(fit.joint, "joint");

  const Eigen::VectorXd r1 = gamma1_residual(fit.joint);
  const Eigen::VectorXd r2 = gamma2_residual(fit.joint);
  fit.rms_gamma1 = rms(r1);
  fit.rms_gamma2 = rms(r2);
  Eigen::VectorXd l1(g1.n.size()), l2(g2.n.size());
  for (Eigen::Index i = 0; i < l1.size(); ++i) l1(i) = std::log(std::fabs(gamma1_model(fit.joint, g1.n(i))) / g1.value(i));
  for (Eigen::Index i = 0; i < l2.size(); ++i) l2(i) = std::log(gamma2_model(fit.joint, g2.n(i)) / g2.value(i));
  fit.log_rms_gamma1 = rms(l1);
  fit.log_rms_gamma2 = rms(l2);
  return fit;
}

}  // namespace mqnmr
