#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "spk/error.hpp"
#include "spk/matrix.hpp"

namespace spk {

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  int sweeps = 0;
  bool converged = false;

  std::size_t size() const { return eigenvalues.size(); }
  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

struct JacobiOptions {
  double symmetry_tol = 1e-12;
  double off_diagonal_tol = 1e-14;  // relative to ‖A‖_F
  int max_sweeps = 50;
};

/// Cyclic Jacobi eigensolver for dense symmetric matrices.
inline SpectralDecomposition symmetric_eig(const Matrix& input, const JacobiOptions& opt = {}) {
  if (!input.is_square() || input.rows() == 0) throw InputError("symmetric_eig: need a non-empty square matrix");
  if (!all_finite(input)) throw InputError("symmetric_eig: non-finite entry");
  if (!is_symmetric(input, opt.symmetry_tol)) throw InputError("symmetric_eig: matrix is not symmetric");

  const std::size_t n = input.rows();
  Matrix a = input;
  // Work on the exactly symmetrized copy.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(n);

  const double target = opt.off_diagonal_tol * frobenius_norm(a);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  SpectralDecomposition d;
  for (d.sweeps = 0; d.sweeps < opt.max_sweeps; ++d.sweeps) {
    if (off_norm() <= target) {
      d.converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Below roundoff relative to the diagonal: drop it.
        if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (!d.converged && off_norm() <= target) d.converged = true;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  d.eigenvalues.resize(n);
  d.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    d.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) d.eigenvectors(r, k) = v(r, order[k]);
  }
  return d;
}

/// max over pairs of ‖Aξ - λξ‖∞.
inline double eig_residual(const Matrix& a, const SpectralDecomposition& d) {
  const std::size_t n = a.rows();
  if (!a.is_square() || d.eigenvectors.rows() != n || d.eigenvectors.cols() != d.size())
    throw InputError("eig_residual: dimension mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = -d.eigenvalues[k] * d.eigenvectors(i, k);
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * d.eigenvectors(j, k);
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

/// max |ΞᵀΞ - I| entrywise.
inline double orthonormality_error(const SpectralDecomposition& d) {
  const Matrix g = transpose(d.eigenvectors) * d.eigenvectors;
  return max_abs_diff(g, Matrix::identity(g.rows()));
}

}  // namespace spk
