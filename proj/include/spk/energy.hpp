#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spk/error.hpp"
#include "spk/graph.hpp"

namespace spk {

/// A function on the vertices of a host graph, taken modulo constants and
/// represented by the member that vanishes at the base point.
class EnergyVector {
 public:
  EnergyVector(WeightedGraph host, const VertexId& base) : host_(std::move(host)), base_(host_.index_of(base)) {
    values_.assign(host_.vertex_count(), 0.0);
  }

  /// Pins an arbitrary function (indexed like host.vertices()) by
  /// subtracting its value at the base point.
  static EnergyVector pinned(WeightedGraph host, const VertexId& base, std::vector<double> values) {
    EnergyVector v(std::move(host), base);
    if (values.size() != v.values_.size()) throw InputError("EnergyVector: value count does not match host");
    const double shift = values[v.base_];
    for (auto& x : values) x -= shift;
    v.values_ = std::move(values);
    return v;
  }

  const WeightedGraph& host() const { return host_; }
  std::size_t base_index() const { return base_; }
  const VertexId& base() const { return host_.vertex(base_); }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double at(const VertexId& x) const { return values_[host_.index_of(x)]; }

  bool compatible(const EnergyVector& o) const { return host_.same_host(o.host_) && base_ == o.base_; }

  EnergyVector& operator+=(const EnergyVector& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  EnergyVector& operator-=(const EnergyVector& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  EnergyVector& operator*=(double s) {
    for (auto& x : values_) x *= s;
    return *this;
  }
  friend EnergyVector operator+(EnergyVector a, const EnergyVector& b) { return a += b; }
  friend EnergyVector operator-(EnergyVector a, const EnergyVector& b) { return a -= b; }
  friend EnergyVector operator*(double s, EnergyVector a) { return a *= s; }

  void require_compatible(const EnergyVector& o) const {
    if (!compatible(o)) throw InputError("energy vectors live on different hosts or base points");
  }

 private:
  WeightedGraph host_;
  std::size_t base_;
  std::vector<double> values_;
};

/// Representative of δ_x. For x ≠ base it is the indicator of x; the base
/// point's own delta is represented by -1 off the base.
inline EnergyVector dirac(const WeightedGraph& g, const VertexId& base, const VertexId& x) {
  std::vector<double> values(g.vertex_count(), 0.0);
  values[g.index_of(x)] = 1.0;
  return EnergyVector::pinned(g, base, std::move(values));
}

/// Σ over unordered edges of μ_xy (u(x)-u(y)) (v(x)-v(y)).
inline double energy_inner(const EnergyVector& u, const EnergyVector& v) {
  u.require_compatible(v);
  double s = 0.0;
  for (const auto& e : u.host().edges()) s += e.weight * (u[e.u] - u[e.v]) * (v[e.u] - v[e.v]);
  return s;
}

inline double energy_norm_squared(const EnergyVector& u) { return energy_inner(u, u); }

/// (Δu)(x) = μ(x) u(x) - Σ_{y~x} μ_xy u(y) on a raw vertex function.
inline double laplacian_apply(const WeightedGraph& g, std::span<const double> u, std::size_t x) {
  double s = g.mu(x) * u[x];
  for (const auto& nb : g.neighbors(x)) s -= nb.weight * u[nb.vertex];
  return s;
}

inline double laplacian_apply(const WeightedGraph& g, const EnergyVector& u, const VertexId& x) {
  if (!g.same_host(u.host())) throw InputError("laplacian_apply: vector does not live on this graph");
  return laplacian_apply(g, u.values(), g.index_of(x));
}

/// Δu at every vertex, indexed like g.vertices(). Not pinned: Δv_x = δ_x - δ_0
/// is nonzero at the base point.
inline std::vector<double> laplacian_vector(const WeightedGraph& g, std::span<const double> u) {
  if (u.size() != g.vertex_count()) throw InputError("laplacian_vector: value count does not match graph");
  std::vector<double> out(g.vertex_count());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = laplacian_apply(g, u, x);
  return out;
}

inline std::vector<double> laplacian_vector(const WeightedGraph& g, const EnergyVector& u) {
  if (!g.same_host(u.host())) throw InputError("laplacian_vector: vector does not live on this graph");
  return laplacian_vector(g, u.values());
}

/// Δu as an element of H_E (pinned at u's base point).
inline EnergyVector laplacian_energy(const EnergyVector& u) {
  return EnergyVector::pinned(u.host(), u.base(), laplacian_vector(u.host(), u));
}

// JSON: {"vertex-id": value, ...}

inline nlohmann::ordered_json to_json(const EnergyVector& v) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < v.size(); ++i) j[v.host().vertex(i).str()] = v[i];
  return j;
}

/// Every non-base vertex must be present; the base value, when given, must be 0.
inline EnergyVector energy_vector_from_json(const WeightedGraph& g, const VertexId& base, const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("energy vector JSON must be an object");
  std::vector<double> values(g.vertex_count(), 0.0);
  std::vector<bool> seen(g.vertex_count(), false);
  for (const auto& [key, val] : j.items()) {
    const std::size_t i = g.index_of(VertexId(key));
    if (!val.is_number()) throw InputError("energy vector value for '" + key + "' is not a number");
    values[i] = val.get<double>();
    seen[i] = true;
  }
  const std::size_t b = g.index_of(base);
  if (values[b] != 0.0) throw InputError("energy vector must vanish at the base point");
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i] && i != b) throw InputError("energy vector is missing vertex '" + g.vertex(i).str() + "'");
  return EnergyVector::pinned(g, base, std::move(values));
}

}  // namespace spk
