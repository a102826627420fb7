#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spk/dipole.hpp"
#include "spk/eigen.hpp"
#include "spk/energy.hpp"
#include "spk/error.hpp"
#include "spk/graph.hpp"
#include "spk/kernel.hpp"
#include "spk/matrix.hpp"

namespace spk {

/// Spectral data of one finite section M_F. Everything is expressed against
/// the ONB u_λ = λ^{-1/2} Σ_x ξ_λ(x) v_x of span{v_x : x in F}.
struct TruncationData {
  std::vector<std::string> labels;  // F
  SpectralDecomposition spectral;   // all of Λ_F
  std::vector<std::size_t> kept;    // columns of `spectral` with λ above the clamp
  std::vector<double> lambdas;      // kept eigenvalues, ascending
  Matrix onb_coeffs;                // |F| x r, column j = ξ_j / √λ_j
  std::vector<double> chi_overlap;  // <ξ_λ, χ_F>
  std::vector<double> delta_coeffs; // <u_λ, P_F δ_0> = -λ^{-1/2} <ξ_λ, χ_F>
  std::vector<double> inverse_lambdas;
  std::size_t dropped = 0;
  std::vector<std::string> warnings;

  std::size_t rank() const { return lambdas.size(); }
  double min_lambda() const { return spectral.min(); }
  double max_lambda() const { return spectral.max(); }

  double xi(std::size_t row, std::size_t j) const { return spectral.eigenvectors(row, kept[j]); }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InputError("'" + label + "' is not in F");
    return static_cast<std::size_t>(it - labels.begin());
  }
};

/// Eigenvalues at or below clamp_tol * max Λ_F are treated as null
/// directions of M_F and excluded from the ONB.
inline TruncationData build_truncation(const KernelMatrix& m, double clamp_tol = 1e-10) {
  if (m.size() == 0) throw InputError("build_truncation: F is empty");
  TruncationData t;
  t.labels = m.labels;
  t.spectral = symmetric_eig(m.entries);
  if (t.spectral.max() <= 0.0) throw ContractViolation("build_truncation: Gram matrix is zero");
  const double cut = clamp_tol * t.spectral.max();
  for (std::size_t k = 0; k < t.spectral.size(); ++k) {
    if (t.spectral.eigenvalues[k] > cut) {
      t.kept.push_back(k);
    } else {
      ++t.dropped;
    }
  }
  if (t.dropped > 0)
    t.warnings.push_back(std::to_string(t.dropped) + " null direction(s) of M_F clamped and excluded");

  const std::size_t n = m.size();
  const std::size_t r = t.kept.size();
  t.onb_coeffs = Matrix(n, r);
  for (std::size_t j = 0; j < r; ++j) {
    const double lambda = t.spectral.eigenvalues[t.kept[j]];
    const double s = 1.0 / std::sqrt(lambda);
    double chi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      t.onb_coeffs(i, j) = t.xi(i, j) * s;
      chi += t.xi(i, j);
    }
    t.lambdas.push_back(lambda);
    t.chi_overlap.push_back(chi);
    t.delta_coeffs.push_back(-chi * s);
    t.inverse_lambdas.push_back(1.0 / lambda);
  }
  return t;
}

/// max |<u_λ, u_λ'> - δ_λλ'| with inner products taken through M_F.
inline double onb_gram_error(const TruncationData& t, const KernelMatrix& m) {
  const Matrix g = transpose(t.onb_coeffs) * m.entries * t.onb_coeffs;
  return max_abs_diff(g, Matrix::identity(g.rows()));
}

/// Coefficients of v_x in the u-basis: √λ ξ_λ(x).
inline std::vector<double> reconstruct_dipole(const TruncationData& t, const std::string& x) {
  const std::size_t i = t.index_of(x);
  std::vector<double> a(t.rank());
  for (std::size_t j = 0; j < t.rank(); ++j) a[j] = std::sqrt(t.lambdas[j]) * t.xi(i, j);
  return a;
}

/// Maps u-basis coefficients back to coefficients on the dipoles {v_x}.
inline std::vector<double> to_dipole_frame(const TruncationData& t, std::span<const double> coeffs) {
  if (coeffs.size() != t.rank()) throw InputError("to_dipole_frame: expected one coefficient per ONB vector");
  return t.onb_coeffs * coeffs;
}

/// Worst entry of M(c_x) - M(·, x) over x in F, where c_x is the dipole-frame
/// form of reconstruct_dipole(t, x).
inline double reconstruction_error(const TruncationData& t, const KernelMatrix& m) {
  double worst = 0.0;
  for (std::size_t x = 0; x < t.labels.size(); ++x) {
    const auto a = reconstruct_dipole(t, t.labels[x]);
    const auto c = to_dipole_frame(t, a);
    const auto col = m.entries * std::span<const double>(c);
    for (std::size_t y = 0; y < col.size(); ++y) worst = std::max(worst, std::abs(col[y] - m(y, x)));
  }
  return worst;
}

struct ProjectedDelta {
  std::vector<double> coefficients;  // in the u-basis
  double norm_squared = 0.0;
};

/// P_F δ_0 for the base point 0 against which M_F was built.
inline ProjectedDelta project_delta(const TruncationData& t) {
  ProjectedDelta p{t.delta_coeffs, 0.0};
  for (std::size_t j = 0; j < t.rank(); ++j) p.norm_squared += t.chi_overlap[j] * t.chi_overlap[j] / t.lambdas[j];
  return p;
}

/// <u_λ, Δ u_λ'> from the pairing <v_x, Δ v_y> = δ_xy + 1.
inline Matrix truncated_laplacian(const TruncationData& t) {
  const std::size_t r = t.rank();
  const std::size_t n = t.labels.size();
  Matrix out(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) {
      double xx = 0.0;
      for (std::size_t i = 0; i < n; ++i) xx += t.xi(i, a) * t.xi(i, b);
      out(a, b) = (xx + t.chi_overlap[a] * t.chi_overlap[b]) / std::sqrt(t.lambdas[a] * t.lambdas[b]);
    }
  return out;
}

/// Same matrix computed from energy inner products <v_x, Δ v_y>_E of solved
/// dipoles on the host graph.
inline Matrix truncated_laplacian_from_energy(const PointedGraph& pg, const TruncationData& t) {
  std::vector<VertexId> f;
  f.reserve(t.labels.size());
  for (const auto& l : t.labels) f.emplace_back(l);
  const auto v = dipoles_for(pg, f);
  std::vector<EnergyVector> lv;
  lv.reserve(v.size());
  for (const auto& d : v) lv.push_back(laplacian_energy(d));
  Matrix pairing(f.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j) pairing(i, j) = energy_inner(v[i], lv[j]);
  return transpose(t.onb_coeffs) * pairing * t.onb_coeffs;
}

/// max |T - diag(λ^{-1}) - u_F u_Fᵀ|.
inline double rank1_residual(const TruncationData& t, const Matrix& laplacian) {
  const std::size_t r = t.rank();
  if (laplacian.rows() != r || laplacian.cols() != r) throw InputError("rank1_residual: dimension mismatch");
  double worst = 0.0;
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) {
      const double expected = (a == b ? t.inverse_lambdas[a] : 0.0) + t.delta_coeffs[a] * t.delta_coeffs[b];
      worst = std::max(worst, std::abs(laplacian(a, b) - expected));
    }
  return worst;
}

inline double rank1_residual(const TruncationData& t) { return rank1_residual(t, truncated_laplacian(t)); }

// ---------------------------------------------------------------------------
// Sweeps over exhaustions

struct SweepRow {
  int k = 0;
  std::size_t n_f = 0;
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  double gap_est = 0.0;    // running min of min Λ_{F_j}, j <= k
  double sigma_est = 0.0;  // running max of max Λ_{F_j}, j <= k
  double proj_delta_normsq = 0.0;
  double norm_bound = 0.0;  // 1/gap_est + ‖P_{F_k} δ_0‖²
};

/// δ_Δ and σ here are finite-sweep estimates, not limits.
struct SweepResult {
  ExhaustionRule rule = ExhaustionRule::cumulative;
  std::vector<SweepRow> rows;
  bool extremes_monotone = true;
  bool sigma_strictly_increasing = true;
  /// Evidence (never proof) that Δ has no bounded inverse: σ keeps growing.
  bool no_bounded_inverse = false;
};

namespace detail {

inline std::vector<VertexId> exhaustion_or_throw(const PointedGraph& pg, ExhaustionRule rule, int k) {
  auto f = exhaustion_set(pg, rule, k);
  if (f.empty())
    throw InputError("exhaustion set F_" + std::to_string(k) + " is empty; enlarge the instance");
  return f;
}

}  // namespace detail

inline SweepResult gap_sweep(const PointedGraph& pg, ExhaustionRule rule, int max_k, bool parallel = true) {
  if (max_k < 1) throw InputError("gap_sweep: K must be >= 1");
  auto one = [&pg, rule](int k) {
    const auto m = gram_for(pg, detail::exhaustion_or_throw(pg, rule, k));
    const auto t = build_truncation(m);
    SweepRow row;
    row.k = k;
    row.n_f = m.size();
    row.min_lambda = t.min_lambda();
    row.max_lambda = t.max_lambda();
    row.proj_delta_normsq = project_delta(t).norm_squared;
    return row;
  };

  SweepResult res;
  res.rule = rule;
  res.rows.resize(max_k);
  if (parallel) {
    std::vector<std::future<SweepRow>> jobs;
    for (int k = 1; k <= max_k; ++k) jobs.push_back(std::async(std::launch::async, one, k));
    for (int k = 1; k <= max_k; ++k) res.rows[k - 1] = jobs[k - 1].get();
  } else {
    for (int k = 1; k <= max_k; ++k) res.rows[k - 1] = one(k);
  }

  double gap = std::numeric_limits<double>::infinity();
  double sigma = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    auto& row = res.rows[i];
    gap = std::min(gap, row.min_lambda);
    sigma = std::max(sigma, row.max_lambda);
    row.gap_est = gap;
    row.sigma_est = sigma;
    row.norm_bound = 1.0 / gap + row.proj_delta_normsq;
    if (i > 0) {
      const auto& prev = res.rows[i - 1];
      const double tol = 1e-10 * std::max(1.0, row.max_lambda);
      if (row.min_lambda > prev.min_lambda + tol || row.max_lambda < prev.max_lambda - tol)
        res.extremes_monotone = false;
      if (!(row.sigma_est > prev.sigma_est + tol)) res.sigma_strictly_increasing = false;
    }
  }
  if (rule == ExhaustionRule::level) res.extremes_monotone = true;  // only asserted for nested rules
  res.no_bounded_inverse = max_k >= 2 && res.sigma_strictly_increasing;
  return res;
}

struct SymmetryCriterion {
  std::vector<double> values;  // s_k = Σ_λ |ξ_λ(x)|² / λ
  double sup_estimate = 0.0;
  bool nondecreasing = true;
};

/// s_k over a nested sequence of kernel sections. s_k = 0 while x is not yet in F_k.
inline SymmetryCriterion symmetry_criterion(std::span<const KernelMatrix> sections, const std::string& x) {
  SymmetryCriterion out;
  for (const auto& m : sections) {
    const auto t = build_truncation(m);
    double s = 0.0;
    if (auto it = std::find(t.labels.begin(), t.labels.end(), x); it != t.labels.end()) {
      const auto i = static_cast<std::size_t>(it - t.labels.begin());
      for (std::size_t j = 0; j < t.rank(); ++j) s += t.xi(i, j) * t.xi(i, j) / t.lambdas[j];
    }
    if (!out.values.empty() && s < out.values.back() - 1e-10 * std::max(1.0, std::abs(s))) out.nondecreasing = false;
    out.values.push_back(s);
    out.sup_estimate = std::max(out.sup_estimate, s);
  }
  return out;
}

inline SymmetryCriterion symmetry_criterion(const PointedGraph& pg, const VertexId& x, ExhaustionRule rule,
                                            int max_k) {
  if (x == pg.base) throw InputError("symmetry_criterion: x is the base point");
  if (!pg.graph.contains(x)) throw InputError("unknown vertex '" + x.str() + "'");
  if (max_k < 1) throw InputError("symmetry_criterion: K must be >= 1");
  std::vector<KernelMatrix> sections;
  for (int k = 1; k <= max_k; ++k) sections.push_back(gram_for(pg, detail::exhaustion_or_throw(pg, rule, k)));
  return symmetry_criterion(sections, x.str());
}

struct CompressionLimitRow {
  int k = 0;
  double compressed = 0.0;    // <v_x, D_{F_k} v_y>
  double laplacian = 0.0;     // <v_x, Δ v_y>_E
  double delta_pairing = 0.0; // <v_x, δ_0>_E <δ_0, v_y>_E
  double residual_minus = 0.0;
  double residual_plus = 0.0;
};

/// Compares <v_x, D_{F_k} v_y> (with D = T - u_F u_Fᵀ) against
/// <v_x, Δ v_y> ∓ <v_x, δ_0><δ_0, v_y>. The minus form is the finite-F
/// identity and vanishes; the plus form is reported alongside it.
inline std::vector<CompressionLimitRow> compression_limit_diagnostic(const PointedGraph& pg, const VertexId& x,
                                                          const VertexId& y, ExhaustionRule rule, int max_k) {
  if (max_k < 1) throw InputError("K must be >= 1");
  const auto f1 = detail::exhaustion_or_throw(pg, rule, 1);
  for (const auto& z : {x, y})
    if (std::find(f1.begin(), f1.end(), z) == f1.end()) throw InputError("'" + z.str() + "' is not in F_1");
  if (rule == ExhaustionRule::level && max_k > 1)
    throw InputError("the level rule is not nested; use the cumulative rule");

  const GroundedLaplacian lap(pg.graph, pg.base);
  const std::size_t b = pg.graph.index_of(pg.base);
  const auto vx = lap.dipole(pg.graph.index_of(x), b);
  const auto vy = lap.dipole(pg.graph.index_of(y), b);
  const auto delta0 = dirac(pg.graph, pg.base, pg.base);
  const double lap_xy = energy_inner(vx, laplacian_energy(vy));
  const double dd = energy_inner(vx, delta0) * energy_inner(delta0, vy);

  std::vector<CompressionLimitRow> rows;
  for (int k = 1; k <= max_k; ++k) {
    const auto t = build_truncation(gram_for(pg, detail::exhaustion_or_throw(pg, rule, k)));
    const auto a = reconstruct_dipole(t, x.str());
    const auto c = reconstruct_dipole(t, y.str());
    const Matrix lt = truncated_laplacian(t);
    double value = 0.0;
    for (std::size_t i = 0; i < t.rank(); ++i)
      for (std::size_t j = 0; j < t.rank(); ++j)
        value += a[i] * (lt(i, j) - t.delta_coeffs[i] * t.delta_coeffs[j]) * c[j];
    rows.push_back({k, value, lap_xy, dd, value - (lap_xy - dd), value - (lap_xy + dd)});
  }
  return rows;
}

}  // namespace spk
