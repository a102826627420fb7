#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spk/energy.hpp"
#include "spk/error.hpp"
#include "spk/graph.hpp"
#include "spk/linalg.hpp"
#include "spk/matrix.hpp"

namespace spk {

/// Finitely supported charge w on the vertices of a host graph.
class ChargeDistribution {
 public:
  explicit ChargeDistribution(WeightedGraph host) : host_(std::move(host)), values_(host_.vertex_count(), 0.0) {}

  ChargeDistribution& add(const VertexId& x, double c) {
    values_[host_.index_of(x)] += c;
    return *this;
  }

  const WeightedGraph& host() const { return host_; }
  std::span<const double> values() const { return values_; }
  double at(const VertexId& x) const { return values_[host_.index_of(x)]; }

  double total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }
  double l1() const {
    double s = 0.0;
    for (double v : values_) s += std::abs(v);
    return s;
  }
  bool zero_sum(double tol = 1e-12) const { return std::abs(total()) <= tol * std::max(1.0, l1()); }

 private:
  WeightedGraph host_;
  std::vector<double> values_;
};

/// Missing vertices carry zero charge.
inline ChargeDistribution charge_from_json(const WeightedGraph& g, const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("charge JSON must be an object");
  ChargeDistribution w(g);
  for (const auto& [key, val] : j.items()) {
    if (!val.is_number()) throw InputError("charge value for '" + key + "' is not a number");
    w.add(VertexId(key), val.get<double>());
  }
  return w;
}

/// The graph Laplacian with the base row and column removed, factored once
/// and reused for any number of right-hand sides.
class GroundedLaplacian {
 public:
  GroundedLaplacian(WeightedGraph g, const VertexId& base)
      : graph_(std::move(g)), base_(graph_.index_of(base)), reduced_(build_reduced(graph_, base_)), lu_(reduced_) {
    if (lu_.singular()) throw ContractViolation("grounded Laplacian is singular");
  }

  const WeightedGraph& graph() const { return graph_; }
  const VertexId& base() const { return graph_.vertex(base_); }

  /// Solves Δv = w with v(base) = 0. `w` is indexed like graph().vertices()
  /// and must sum to zero; the base equation then holds automatically.
  EnergyVector solve(std::span<const double> w) const {
    if (w.size() != graph_.vertex_count()) throw InputError("charge size does not match graph");
    std::vector<double> rhs;
    rhs.reserve(w.size() - 1);
    for (std::size_t i = 0; i < w.size(); ++i)
      if (i != base_) rhs.push_back(w[i]);
    const auto x = solve_refined(reduced_, lu_, rhs);
    std::vector<double> values(w.size(), 0.0);
    for (std::size_t i = 0, k = 0; i < w.size(); ++i)
      if (i != base_) values[i] = x[k++];
    return EnergyVector::pinned(graph_, base(), std::move(values));
  }

  EnergyVector dipole(std::size_t x, std::size_t y) const {
    std::vector<double> w(graph_.vertex_count(), 0.0);
    w[x] += 1.0;
    w[y] -= 1.0;
    return solve(w);
  }

 private:
  static Matrix build_reduced(const WeightedGraph& g, std::size_t base) {
    if (g.vertex_count() < 2) throw InputError("grounded solve needs at least two vertices");
    if (!is_connected(g)) throw InputError("graph is disconnected");
    const std::size_t n = g.vertex_count();
    auto reduced_index = [base](std::size_t i) { return i < base ? i : i - 1; };
    Matrix a(n - 1, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == base) continue;
      const std::size_t ri = reduced_index(i);
      a(ri, ri) = g.mu(i);
      for (const auto& nb : g.neighbors(i))
        if (nb.vertex != base) a(ri, reduced_index(nb.vertex)) -= nb.weight;
    }
    return a;
  }

  WeightedGraph graph_;
  std::size_t base_;
  Matrix reduced_;
  LuDecomposition lu_;
};

/// v with Δv = δ_x - δ_y and v(base) = 0.
inline EnergyVector solve_dipole(const WeightedGraph& g, const VertexId& base, const VertexId& x, const VertexId& y) {
  if (x == y) throw InputError("solve_dipole: x and y must differ");
  const std::size_t xi = g.index_of(x);
  const std::size_t yi = g.index_of(y);
  return GroundedLaplacian(g, base).dipole(xi, yi);
}

inline EnergyVector solve_dipole(const PointedGraph& pg, const VertexId& x) {
  return solve_dipole(pg.graph, pg.base, x, pg.base);
}

/// One term c (δ_plus - δ_minus) of a dipole decomposition.
struct DipoleTerm {
  double coefficient;
  std::size_t plus;
  std::size_t minus;
};

/// Splits a zero-sum charge into a finite sum of dipoles by repeatedly
/// pairing the largest remaining positive charge with the largest remaining
/// negative one (ties go to the earlier vertex).
inline std::vector<DipoleTerm> decompose_charges(const ChargeDistribution& w, double tol = 1e-12) {
  if (!w.zero_sum(tol)) throw InputError("charge distribution is not zero-sum");
  std::vector<double> rest(w.values().begin(), w.values().end());
  const double eps = tol * std::max(1.0, w.l1());
  std::vector<DipoleTerm> terms;
  for (;;) {
    std::size_t p = rest.size();
    std::size_t m = rest.size();
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] > eps && (p == rest.size() || rest[i] > rest[p])) p = i;
      if (rest[i] < -eps && (m == rest.size() || rest[i] < rest[m])) m = i;
    }
    if (p == rest.size() || m == rest.size()) break;
    const double c = std::min(rest[p], -rest[m]);
    terms.push_back({c, p, m});
    rest[p] -= c;
    rest[m] += c;
  }
  return terms;
}

/// Δv = w by superposition of dipole solutions.
inline EnergyVector solve_poisson(const WeightedGraph& g, const VertexId& base, const ChargeDistribution& w) {
  if (!g.same_host(w.host())) throw InputError("charge lives on a different graph");
  const auto terms = decompose_charges(w);
  const GroundedLaplacian lap(g, base);
  EnergyVector v(g, base);
  for (const auto& t : terms) v += t.coefficient * lap.dipole(t.plus, t.minus);
  return v;
}

/// Δv = w by a single grounded solve.
inline EnergyVector solve_poisson_direct(const WeightedGraph& g, const VertexId& base, const ChargeDistribution& w) {
  if (!g.same_host(w.host())) throw InputError("charge lives on a different graph");
  if (!w.zero_sum()) throw InputError("charge distribution is not zero-sum");
  return GroundedLaplacian(g, base).solve(w.values());
}

/// Smallest instance radius at which the family dipole v_x is exact.
inline int variation_radius(FamilyKind kind, const VertexId& x) {
  switch (kind) {
    case FamilyKind::segment: return static_cast<int>(std::llabs(segment_coordinate(x))) + 1;
    case FamilyKind::tree: return word_length(x);
    case FamilyKind::file: break;
  }
  throw InputError("variation radius is only defined for built-in families");
}

/// Number of edges shared by the root paths of two tree words.
inline int common_path_length(const VertexId& a, const VertexId& b) {
  if (a == tree_root() || b == tree_root()) return 0;
  const auto& s = a.str();
  const auto& t = b.str();
  int n = 0;
  while (n < static_cast<int>(std::min(s.size(), t.size())) && s[n] == t[n]) ++n;
  return n;
}

/// Closed-form dipole value v_x(y) on the infinite family graph.
inline long long dipole_closed_value(FamilyKind kind, const VertexId& x, const VertexId& y) {
  if (kind == FamilyKind::segment) {
    const long long a = segment_coordinate(x);
    const long long t = segment_coordinate(y);
    if (a > 0) return std::clamp(t, 0LL, a);
    return std::clamp(-t, 0LL, -a);
  }
  if (kind == FamilyKind::tree) return common_path_length(x, y);
  throw InputError("closed forms exist only for the segment and tree families");
}

/// The infinite-graph dipole v_x restricted to a family instance.
inline EnergyVector dipole_closed_form(const PointedGraph& family, const VertexId& x) {
  if (family.kind == FamilyKind::file) throw InputError("closed forms exist only for the segment and tree families");
  if (x == family.base) throw InputError("dipole_closed_form: x is the base point");
  if (!family.graph.contains(x)) throw InputError("unknown vertex '" + x.str() + "'");
  if (family.radius < variation_radius(family.kind, x))
    throw InputError("instance radius " + std::to_string(family.radius) + " is below the variation radius of v_" +
                     x.str());
  std::vector<double> values(family.graph.vertex_count());
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = static_cast<double>(dipole_closed_value(family.kind, x, family.graph.vertex(i)));
  return EnergyVector::pinned(family.graph, family.base, std::move(values));
}

}  // namespace spk
