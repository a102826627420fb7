#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spk/dipole.hpp"
#include "spk/energy.hpp"
#include "spk/error.hpp"
#include "spk/graph.hpp"

namespace spk {

/// y -> M(y, x). Under the pinning convention this is the dipole v_x.
inline EnergyVector greens_column(const PointedGraph& pg, const VertexId& x) {
  if (x == pg.base) throw InputError("greens_column: x is the base point");
  if (pg.kind == FamilyKind::file) return solve_dipole(pg, x);
  return dipole_closed_form(pg, x);
}

/// Per-vertex view of the Green-kernel identities for a fixed x. The
/// "stated" residuals measure two identities as printed; they are reported
/// and never asserted to vanish.
struct GreensRow {
  VertexId y;
  double kernel = 0.0;              // M(y, x)
  double laplacian = 0.0;           // (Δ_· M(·, x))(y)
  double dipole_residual = 0.0;     // laplacian - (δ_x - δ_0)(y)
  std::optional<double> stated_residual;  // -laplacian - (δ_xy + 1 - μ(y) M(y, x)); not defined at the base
  double neighbor_sum_residual = 0.0;     // Σ_{z~x} μ_xz (v_x - v_z)(y) - (Δ v_x)(y)
};

struct GreensReport {
  VertexId x;
  double dipole_identity_residual = 0.0;        // max over interior y, asserted small
  double stated_identity_residual = 0.0;        // max |.| over interior y ≠ base, reported
  double neighbor_sum_identity_residual = 0.0;  // max |.| over interior y, reported
  std::vector<GreensRow> rows;                  // interior vertices only
};

/// Vertices whose full neighbourhood in the infinite family graph is present
/// in the instance. File graphs are their own infinite object.
inline std::vector<std::size_t> interior_vertices(const PointedGraph& pg) {
  std::vector<std::size_t> out;
  const auto dist = hop_distances(pg.graph, pg.graph.index_of(pg.base));
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (pg.kind == FamilyKind::file || dist[i] < pg.radius) out.push_back(i);
  return out;
}

/// Requires the instance radius to exceed the variation radius of v_x plus
/// one, so that v_x, the dipoles of x's neighbours and every reported
/// Laplacian value are exact.
inline GreensReport greens_laplacian_check(const PointedGraph& pg, const VertexId& x) {
  if (x == pg.base) throw InputError("greens_laplacian_check: x is the base point");
  if (!pg.graph.contains(x)) throw InputError("unknown vertex '" + x.str() + "'");
  if (pg.kind != FamilyKind::file && pg.radius <= variation_radius(pg.kind, x) + 1)
    throw InputError("radius " + std::to_string(pg.radius) + " must exceed the variation radius of v_" + x.str() +
                     " plus one");

  const auto& g = pg.graph;
  const std::size_t xi = g.index_of(x);
  const std::size_t b = g.index_of(pg.base);
  const auto column = greens_column(pg, x);
  const auto lap = laplacian_vector(g, column);

  // Σ_{z~x} μ_xz (v_x - v_z); the base point's dipole is zero.
  std::vector<double> neighbor_sum(g.vertex_count(), 0.0);
  for (const auto& nb : g.neighbors(xi)) {
    std::vector<double> vz(g.vertex_count(), 0.0);
    if (nb.vertex != b) {
      const auto d = greens_column(pg, g.vertex(nb.vertex));
      vz.assign(d.values().begin(), d.values().end());
    }
    for (std::size_t i = 0; i < vz.size(); ++i) neighbor_sum[i] += nb.weight * (column[i] - vz[i]);
  }

  GreensReport rep;
  rep.x = x;
  for (std::size_t y : interior_vertices(pg)) {
    GreensRow row;
    row.y = g.vertex(y);
    row.kernel = column[y];
    row.laplacian = lap[y];
    const double expected = (y == xi ? 1.0 : 0.0) - (y == b ? 1.0 : 0.0);
    row.dipole_residual = lap[y] - expected;
    if (y != b) {
      const double stated = (y == xi ? 1.0 : 0.0) + 1.0 - g.mu(y) * column[y];
      row.stated_residual = -lap[y] - stated;
      rep.stated_identity_residual = std::max(rep.stated_identity_residual, std::abs(*row.stated_residual));
    }
    row.neighbor_sum_residual = neighbor_sum[y] - lap[y];
    rep.dipole_identity_residual = std::max(rep.dipole_identity_residual, std::abs(row.dipole_residual));
    rep.neighbor_sum_identity_residual =
        std::max(rep.neighbor_sum_identity_residual, std::abs(row.neighbor_sum_residual));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline const GreensRow& row_at(const GreensReport& rep, const VertexId& y) {
  for (const auto& r : rep.rows)
    if (r.y == y) return r;
  throw InputError("vertex '" + y.str() + "' is not in the report");
}

inline nlohmann::ordered_json to_json(const GreensReport& rep) {
  nlohmann::ordered_json j;
  j["x"] = rep.x.str();
  j["dipole_identity_residual"] = rep.dipole_identity_residual;
  j["stated_identity_residual"] = rep.stated_identity_residual;
  j["neighbor_sum_identity_residual"] = rep.neighbor_sum_identity_residual;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json o;
    o["vertex"] = r.y.str();
    o["kernel"] = r.kernel;
    o["laplacian"] = r.laplacian;
    o["dipole_residual"] = r.dipole_residual;
    o["stated_residual"] = r.stated_residual ? nlohmann::ordered_json(*r.stated_residual) : nlohmann::ordered_json(nullptr);
    o["neighbor_sum_residual"] = r.neighbor_sum_residual;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace spk
