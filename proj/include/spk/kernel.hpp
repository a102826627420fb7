#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spk/dipole.hpp"
#include "spk/eigen.hpp"
#include "spk/energy.hpp"
#include "spk/error.hpp"
#include "spk/graph.hpp"
#include "spk/matrix.hpp"

namespace spk {

/// Finite section M_F = (M(x,y))_{x,y in F} of a positive semidefinite kernel.
struct KernelMatrix {
  std::vector<std::string> labels;
  Matrix entries;

  std::size_t size() const { return labels.size(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InputError("label '" + label + "' is not in the kernel index");
    return static_cast<std::size_t>(it - labels.begin());
  }

  /// Section on a subset of the labels, in the given order.
  KernelMatrix section(std::span<const std::string> subset) const {
    std::vector<std::size_t> idx;
    idx.reserve(subset.size());
    for (const auto& l : subset) idx.push_back(index_of(l));
    return {std::vector<std::string>(subset.begin(), subset.end()), principal_submatrix(entries, idx)};
  }
};

inline std::vector<std::string> labels_of(std::span<const VertexId> f) {
  std::vector<std::string> out;
  out.reserve(f.size());
  for (const auto& v : f) out.push_back(v.str());
  return out;
}

namespace detail {

inline void check_index_set(const PointedGraph& pg, std::span<const VertexId> f) {
  std::set<VertexId> seen;
  for (const auto& x : f) {
    if (x == pg.base) throw InputError("the base point may not belong to F");
    if (!pg.graph.contains(x)) throw InputError("unknown vertex '" + x.str() + "'");
    if (!seen.insert(x).second) throw InputError("duplicate vertex '" + x.str() + "' in F");
  }
}

}  // namespace detail

/// The dipoles v_x, x in F, solved against the base point.
inline std::vector<EnergyVector> dipoles_for(const PointedGraph& pg, std::span<const VertexId> f) {
  detail::check_index_set(pg, f);
  const GroundedLaplacian lap(pg.graph, pg.base);
  const std::size_t b = pg.graph.index_of(pg.base);
  std::vector<EnergyVector> out;
  out.reserve(f.size());
  for (const auto& x : f) out.push_back(lap.dipole(pg.graph.index_of(x), b));
  return out;
}

/// M(x,y) = <v_x, v_y>_E from solved dipoles.
inline KernelMatrix gram_from_energy(const PointedGraph& pg, std::span<const VertexId> f) {
  const auto v = dipoles_for(pg, f);
  KernelMatrix m{labels_of(f), Matrix(f.size(), f.size())};
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) m.entries(i, j) = m.entries(j, i) = energy_inner(v[i], v[j]);
  return m;
}

/// Exact integer kernel of the built-in families: min(|x|,|y|) on equal signs
/// for the segment, shared root-path length for the tree.
inline KernelMatrix gram_closed_form(FamilyKind kind, std::span<const VertexId> f) {
  if (kind == FamilyKind::file) throw InputError("closed forms exist only for the segment and tree families");
  const VertexId base = kind == FamilyKind::tree ? tree_root() : segment_vertex(0);
  KernelMatrix m{labels_of(f), Matrix(f.size(), f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == base) throw InputError("the base point may not belong to F");
    for (std::size_t j = 0; j <= i; ++j)
      m.entries(i, j) = m.entries(j, i) = static_cast<double>(dipole_closed_value(kind, f[i], f[j]));
  }
  return m;
}

/// Closed form for families, energy Gram otherwise.
inline KernelMatrix gram_for(const PointedGraph& pg, std::span<const VertexId> f) {
  if (pg.kind == FamilyKind::file) return gram_from_energy(pg, f);
  detail::check_index_set(pg, f);
  return gram_closed_form(pg.kind, f);
}

/// M_k on the words of length k, built as M_1 = I and
/// M_{k+1} = diag(τ(M_k), τ(M_k)) with τ adding 1 to every entry.
inline KernelMatrix tree_level_recursion(int k, int max_k = 12) {
  if (k < 1 || k > max_k) throw InputError("tree_level_recursion: k out of range [1, " + std::to_string(max_k) + "]");
  Matrix m = Matrix::identity(2);
  std::vector<std::string> words{"0", "1"};
  for (int level = 1; level < k; ++level) {
    const std::size_t n = m.rows();
    Matrix next(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next(i, j) = next(n + i, n + j) = m(i, j) + 1.0;
    std::vector<std::string> w;
    w.reserve(2 * n);
    for (const char c : {'0', '1'})
      for (const auto& s : words) w.push_back(c + s);
    m = std::move(next);
    words = std::move(w);
  }
  return {std::move(words), std::move(m)};
}

struct PsdReport {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// PSD iff min eigenvalue >= -tol * max(1, max eigenvalue).
inline PsdReport psd_check(const Matrix& m, double tol = 1e-10) {
  if (!is_symmetric(m, 1e-12)) throw InputError("psd_check: matrix is not symmetric");
  const auto d = symmetric_eig(m);
  return {d.min() >= -tol * std::max(1.0, d.max()), d.min(), d.max()};
}

inline PsdReport psd_check(const KernelMatrix& m, double tol = 1e-10) { return psd_check(m.entries, tol); }

/// f_c = Σ c_x M(·, x), finitely supported coefficients keyed by label.
struct KernelVector {
  std::map<std::string, double> coefficients;
};

inline double kernel_vector_inner(const KernelVector& a, const KernelVector& b, const KernelMatrix& m) {
  double s = 0.0;
  for (const auto& [x, ax] : a.coefficients) {
    const std::size_t i = m.index_of(x);
    for (const auto& [y, by] : b.coefficients) s += ax * m(i, m.index_of(y)) * by;
  }
  return s;
}

/// f_c(x) = Σ_y c_y M(x, y).
inline double kernel_vector_eval(const KernelVector& c, const KernelMatrix& m, const std::string& x) {
  const std::size_t i = m.index_of(x);
  double s = 0.0;
  for (const auto& [y, cy] : c.coefficients) s += cy * m(i, m.index_of(y));
  return s;
}

/// Rows w_x of Ξ diag(√λ), so that <w_x, w_y> = M(x, y). Eigenvalues below
/// tol * max are clamped to zero.
inline Matrix gram_factorization(const KernelMatrix& m, double tol = 1e-10) {
  const auto d = symmetric_eig(m.entries);
  if (d.min() < -tol * std::max(1.0, d.max())) throw ContractViolation("gram_factorization: matrix is not PSD");
  const double cut = tol * std::max(1.0, d.max());
  Matrix w(m.size(), m.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double s = d.eigenvalues[k] > cut ? std::sqrt(d.eigenvalues[k]) : 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) w(i, k) = d.eigenvectors(i, k) * s;
  }
  return w;
}

/// Sampled kernel 1/(1 - xy) on distinct points of [0, 1).
inline KernelMatrix szego_gram(std::span<const double> points) {
  std::set<double> seen;
  for (double p : points) {
    if (!(p >= 0.0 && p < 1.0)) throw InputError("Szegő kernel points must lie in [0, 1)");
    if (!seen.insert(p).second) throw InputError("duplicate Szegő kernel point");
  }
  KernelMatrix m;
  m.entries = Matrix(points.size(), points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", points[i]);
    m.labels.emplace_back(buf);
    for (std::size_t j = 0; j <= i; ++j) m.entries(i, j) = m.entries(j, i) = 1.0 / (1.0 - points[i] * points[j]);
  }
  return m;
}

/// The matrix (<δ_x, δ_y>_E) over all vertices: μ(x) on the diagonal,
/// -μ_xy off it. Built from energy inner products of Dirac vectors.
inline KernelMatrix dirac_gram(const WeightedGraph& g) {
  if (g.vertex_count() == 0) throw InputError("dirac_gram: empty graph");
  const VertexId& base = g.vertex(0);
  std::vector<EnergyVector> deltas;
  deltas.reserve(g.vertex_count());
  for (const auto& x : g.vertices()) deltas.push_back(dirac(g, base, x));
  KernelMatrix m{labels_of(g.vertices()), Matrix(g.vertex_count(), g.vertex_count())};
  for (std::size_t i = 0; i < deltas.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) m.entries(i, j) = m.entries(j, i) = energy_inner(deltas[i], deltas[j]);
  return m;
}

}  // namespace spk
