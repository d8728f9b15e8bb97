#include "mqnmr/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mqnmr/errors.hpp"

namespace mqnmr {

TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diagonal, std::span<const double> off_diagonal,
                                             int max_iterations) {
  const Eigen::Index n = static_cast<Eigen::Index>(diagonal.size());
  if (n == 0) throw ContractViolation("symmetric_tridiagonal_eigen: empty matrix");
  if (off_diagonal.size() + 1 != diagonal.size()) {
    throw ContractViolation("symmetric_tridiagonal_eigen: off-diagonal length must be dimension - 1");
  }

  std::vector<double> d(diagonal.begin(), diagonal.end());
  // e[i] couples i and i+1; e[n-1] = 0 terminates the small-element search.
  std::vector<double> e(off_diagonal.begin(), off_diagonal.end());
  e.push_back(0.0);
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  const double eps = std::numeric_limits<double>::epsilon();
  double shift_sum = 0.0;
  double tst1 = 0.0;

  for (Eigen::Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    Eigen::Index m = l;
    while (m < n && std::fabs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iterations) {
          throw NumericalError("implicit QL: eigenvalue " + std::to_string(l) + " of " + std::to_string(n) +
                               " did not converge in " + std::to_string(max_iterations) + " iterations");
        }
        // Shift from the leading 2x2 block.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (Eigen::Index i = l + 2; i < n; ++i) d[i] -= h;
        shift_sum += h;

        // Chase the bulge from m back to l with Givens rotations.
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (Eigen::Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          auto col_i = v.col(i);
          auto col_next = v.col(i + 1);
          for (Eigen::Index k = 0; k < n; ++k) {
            const double t = col_next(k);
            col_next(k) = s * col_i(k) + c * t;
            col_i(k) = c * col_i(k) - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > eps * tst1);
    }
    d[l] += shift_sum;
    e[l] = 0.0;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });

  TridiagonalEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = d[order[static_cast<std::size_t>(j)]];
    out.vectors.col(j) = v.col(order[static_cast<std::size_t>(j)]);
  }
  canonicalize_signs(out.vectors);
  return out;
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double largest = col.cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    while (std::fabs(col(pivot)) < largest * (1.0 - 1e-10)) ++pivot;
    if (col(pivot) < 0) col = -col;
  }
}

}  // namespace mqnmr
