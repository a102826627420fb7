#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "spk/dipole.hpp"
#include "spk/energy.hpp"

using namespace spk;

TEST(EnergyInner, DiracNormIsMu) {
  const auto t = make_tree(3);
  const auto d = dirac(t, tree_root(), VertexId("01"));
  EXPECT_DOUBLE_EQ(energy_inner(d, d), 3.0);
}

TEST(EnergyInner, AdjacentDiracsPairToMinusWeight) {
  const auto s = make_segment(5);
  const auto base = segment_vertex(0);
  EXPECT_DOUBLE_EQ(energy_inner(dirac(s, base, segment_vertex(2)), dirac(s, base, segment_vertex(3))), -1.0);
}

TEST(EnergyInner, ZeroVector) {
  const auto s = make_segment(2);
  const EnergyVector z(s, segment_vertex(0));
  EXPECT_EQ(energy_inner(z, z), 0.0);
}

TEST(EnergyInner, HostMismatchThrows) {
  const auto a = make_segment(2);
  const auto b = make_segment(2);
  EXPECT_THROW(energy_inner(EnergyVector(a, segment_vertex(0)), EnergyVector(b, segment_vertex(0))), InputError);
  EXPECT_THROW(energy_inner(EnergyVector(a, segment_vertex(0)), EnergyVector(a, segment_vertex(1))), InputError);
}

TEST(EnergyInner, MatchesOrderedPairSum) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 15, 0.1, 10.0, 0.2);
    const auto u = oracle::random_vector(rng, g.vertex_count());
    const auto v = oracle::random_vector(rng, g.vertex_count());
    const auto eu = EnergyVector::pinned(g, g.vertex(0), u);
    const auto ev = EnergyVector::pinned(g, g.vertex(0), v);
    EXPECT_NEAR(energy_inner(eu, ev), oracle::ordered_pair_energy(g, u, v), 1e-10);
  }
}

TEST(EnergyInner, BilinearAndSymmetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 12, 0.1, 10.0, 0.3);
    const auto& base = g.vertex(0);
    const auto u = EnergyVector::pinned(g, base, oracle::random_vector(rng, g.vertex_count()));
    const auto v = EnergyVector::pinned(g, base, oracle::random_vector(rng, g.vertex_count()));
    const auto w = EnergyVector::pinned(g, base, oracle::random_vector(rng, g.vertex_count()));
    const double a = coef(rng), b = coef(rng);
    const double lhs = energy_inner(a * u + b * v, w);
    const double rhs = a * energy_inner(u, w) + b * energy_inner(v, w);
    EXPECT_NEAR(lhs, rhs, 1e-9 * (1.0 + std::abs(rhs)));
    EXPECT_NEAR(energy_inner(u, v), energy_inner(v, u), 1e-12);
    EXPECT_GE(energy_inner(u, u), 0.0);
  }
}

TEST(Dirac, Identities) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 15, 0.1, 10.0, 0.2);
    const auto& base = g.vertex(0);
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      const auto dx = dirac(g, base, g.vertex(x));
      EXPECT_NEAR(energy_inner(dx, dx), g.mu(x), 1e-12);
      for (std::size_t y = x + 1; y < g.vertex_count(); ++y)
        EXPECT_NEAR(energy_inner(dx, dirac(g, base, g.vertex(y))), -g.weight(x, y), 1e-12);
    }
  }
}

TEST(Dirac, SingleNonzeroAwayFromBase) {
  const auto t = make_tree(2);
  const auto d = dirac(t, tree_root(), VertexId("10"));
  int nonzero = 0;
  for (double v : d.values()) nonzero += v != 0.0;
  EXPECT_EQ(nonzero, 1);
}

TEST(Laplacian, SegmentInteriorStencil) {
  const auto s = make_segment(6);
  std::mt19937_64 rng(17);
  const auto u = oracle::random_vector(rng, s.vertex_count());
  for (long long x = -5; x <= 5; ++x) {
    const std::size_t i = s.index_of(segment_vertex(x));
    EXPECT_NEAR(laplacian_apply(s, u, i), 2 * u[i] - u[i - 1] - u[i + 1], 1e-14);
  }
}

TEST(Laplacian, InfiniteEnergyHarmonicTruncation) {
  // v(t) = max(t, 0) restricted to the segment: Δv = -δ_0 at the origin.
  const auto s = make_segment(10);
  std::vector<double> v(s.vertex_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, static_cast<double>(segment_coordinate(s.vertex(i))));
  const auto ev = EnergyVector::pinned(s, segment_vertex(0), v);
  EXPECT_DOUBLE_EQ(laplacian_apply(s, ev, segment_vertex(0)), -1.0);
}

TEST(Laplacian, ConstantsAreHarmonic) {
  const auto t = make_tree(3);
  const std::vector<double> c(t.vertex_count(), 4.25);
  for (double v : laplacian_vector(t, c)) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, DiracEvaluatedAtItself) {
  const auto s = make_segment(5);
  const auto d = dirac(s, segment_vertex(0), segment_vertex(2));
  EXPECT_DOUBLE_EQ(laplacian_apply(s, d, segment_vertex(2)), 2.0);
}

TEST(Laplacian, ZeroGivesZero) {
  const auto t = make_tree(2);
  for (double v : laplacian_vector(t, EnergyVector(t, tree_root()))) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, EqualsDiracPairing) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 20, 0.1, 10.0, 0.15);
    const auto& base = g.vertex(0);
    const auto u = EnergyVector::pinned(g, base, oracle::random_vector(rng, g.vertex_count()));
    const auto lap = laplacian_vector(g, u);
    for (std::size_t x = 0; x < g.vertex_count(); ++x)
      EXPECT_NEAR(lap[x], energy_inner(dirac(g, base, g.vertex(x)), u), 1e-12);
  }
}

TEST(Laplacian, HermitianOnDipoleSpan) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 18, 0.1, 10.0, 0.15);
    const auto& base = g.vertex(0);
    const GroundedLaplacian lap(g, base);
    std::uniform_int_distribution<std::size_t> pick(1, g.vertex_count() - 1);
    const auto u = lap.dipole(pick(rng), 0) + 0.5 * lap.dipole(pick(rng), 0);
    const auto v = lap.dipole(pick(rng), 0);
    EXPECT_NEAR(energy_inner(laplacian_energy(u), v), energy_inner(u, laplacian_energy(v)), 1e-10);
  }
}

TEST(EnergyJson, RoundTripAndPinning) {
  const auto t = make_tree(2);
  const auto d = dirac(t, tree_root(), VertexId("01"));
  const auto back = energy_vector_from_json(t, tree_root(), to_json(d));
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(back[i], d[i]);

  auto j = to_json(d);
  j["∅"] = 1.0;
  EXPECT_THROW(energy_vector_from_json(t, tree_root(), j), InputError);
  j.erase("∅");
  j.erase("11");
  EXPECT_THROW(energy_vector_from_json(t, tree_root(), j), InputError);
}
