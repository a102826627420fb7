// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spk/spk.hpp"

using namespace spk;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

PointedGraph random_pointed(std::mt19937_64& rng, std::size_t n, double density = 0.05) {
  const auto g = oracle::random_connected_graph(rng, n, 0.1, 10.0, density);
  return {g, g.vertex(0), FamilyKind::file, 0};
}

std::size_t random_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Largest entry distance from the nearest integer.
double integrality_error(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - std::round(m(i, j))));
  return worst;
}

Outcome tree_gram_tables() {
  Outcome o;
  const auto pg = make_family(FamilyKind::tree, 6);
  for (int k = 1; k <= 6; ++k) {
    const auto rec = tree_level_recursion(k);
    const auto f = exhaustion_set(pg, ExhaustionRule::level, k);
    o.require(rec.labels == labels_of(f) && rec.entries == gram_closed_form(FamilyKind::tree, f).entries,
              "recursion k=" + std::to_string(k));
  }

  const auto t3 = make_family(FamilyKind::tree, 3);
  const auto f = exhaustion_set(t3, ExhaustionRule::cumulative, 3);
  const auto closed = gram_for(t3, f);
  const auto energy = gram_from_energy(t3, f);
  o.require(closed.labels == oracle::printed_tree_labels(), "label order");
  const auto& table = oracle::printed_tree_table();
  const auto asym = oracle::asymmetric_entries(table);
  int literal = 0, transposed = 0, wrong = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (closed(i, j) == table[i][j]) {
        ++literal;
        continue;
      }
      const bool printed_asymmetric = std::find(asym.begin(), asym.end(), std::make_pair(i, j)) != asym.end();
      if (printed_asymmetric && closed(i, j) == table[j][i]) {
        ++transposed;
        o.detail << " printed(" << closed.labels[i] << "," << closed.labels[j] << ")=" << table[i][j]
                 << " vs transpose " << table[j][i] << ", computed " << closed(i, j) << ";";
      } else {
        ++wrong;
      }
    }
  o.require(wrong == 0, std::to_string(wrong) + " entries disagree with the table");
  o.require(max_abs_diff(energy.entries, closed.entries) <= 1e-9, "energy Gram vs closed form");
  o.detail << " literal matches " << literal << "/196, asymmetric printed cells matched by transpose " << transposed;
  return o;
}

Outcome tree_spectra() {
  Outcome o;
  const auto s = gap_sweep(make_family(FamilyKind::tree, 6), ExhaustionRule::level, 6);
  double worst = 0.0;
  for (const auto& r : s.rows) {
    worst = std::max(worst, std::abs(r.min_lambda - 1.0));
    worst = std::max(worst, std::abs(r.max_lambda - (std::pow(2.0, r.k) - 1.0)));
  }
  o.require(worst <= 1e-9, "eigenvalue error");
  o.detail << " max |error| = " << worst;
  return o;
}

Outcome projected_delta_norms() {
  Outcome o;
  const auto pg = make_family(FamilyKind::tree, 6);
  double worst = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const auto t = build_truncation(gram_for(pg, exhaustion_set(pg, ExhaustionRule::level, k)));
    const double p = std::pow(2.0, k);
    worst = std::max(worst, std::abs(project_delta(t).norm_squared - p / (p - 1.0)));
  }
  const auto d = dirac(pg.graph, pg.base, pg.base);
  const double norm = energy_inner(d, d);
  o.require(worst <= 1e-9, "projected norm error");
  o.require(norm == 2.0, "‖δ_∅‖² = 2");
  o.detail << " level sets of depth k; max |error| = " << worst << ", ‖δ_∅‖² = " << norm;
  return o;
}

Outcome boundedness_bound() {
  Outcome o;
  const auto pg = make_family(FamilyKind::tree, 6);
  const auto s = gap_sweep(pg, ExhaustionRule::level, 6);
  const double gap = s.rows.back().gap_est;
  const auto d = dirac(pg.graph, pg.base, pg.base);
  const double bound = 1.0 / gap + energy_inner(d, d);
  o.require(std::abs(gap - 1.0) <= 1e-9, "gap estimate 1");
  o.require(std::abs(bound - 3.0) <= 1e-9, "bound 3");

  // Rayleigh quotients of u = Σ c_x v_x over depth <= 5: <u,Δu> = cᵀ(I+J)c, <u,u> = cᵀMc.
  const auto t5 = make_family(FamilyKind::tree, 5);
  const auto m = gram_for(t5, exhaustion_set(t5, ExhaustionRule::cumulative, 5));
  std::mt19937_64 rng(20261018);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = oracle::random_vector(rng, m.size());
    double sum = 0.0, sq = 0.0;
    for (double v : c) {
      sum += v;
      sq += v * v;
    }
    const auto mc = m.entries * std::span<const double>(c);
    worst = std::max(worst, (sq + sum * sum) / dot(c, mc));
  }
  o.require(worst <= 3.0 + 1e-6, "Rayleigh quotient above 3");
  const auto t = build_truncation(m);
  const double sup = symmetric_eig(truncated_laplacian(t)).max();
  o.detail << " gap_est = " << gap << ", bound = " << bound << ", max sampled Rayleigh = " << worst
           << "; note: exact max over the same span = " << sup << " (exceeds 3)";
  return o;
}

Outcome segment_kernel() {
  Outcome o;
  const auto pg = make_family(FamilyKind::segment, 7);
  std::vector<VertexId> f;
  for (long long x = 1; x <= 6; ++x) f.push_back(segment_vertex(x));
  const auto m = gram_from_energy(pg, f);
  double dev = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j)
      dev = std::max(dev, std::abs(m(i, j) - static_cast<double>(std::min(i, j) + 1)));
  o.require(dev <= 1e-9 && integrality_error(m.entries) <= 1e-9, "min-matrix");

  std::vector<VertexId> both;
  for (long long x = -6; x <= 6; ++x)
    if (x != 0) both.push_back(segment_vertex(x));
  const auto mb = gram_from_energy(pg, both);
  double cross = 0.0;
  for (std::size_t i = 0; i < both.size(); ++i)
    for (std::size_t j = 0; j < both.size(); ++j)
      if ((segment_coordinate(both[i]) < 0) != (segment_coordinate(both[j]) < 0)) cross = std::max(cross, std::abs(mb(i, j)));
  o.require(cross <= 1e-9, "across-sign entries");
  o.detail << " max deviation from min(i,j) = " << dev << ", max across-sign |entry| = " << cross;
  return o;
}

/// The instance set shared by the rank-one and ONB criteria.
std::vector<std::pair<PointedGraph, std::vector<VertexId>>> truncation_instances() {
  std::vector<std::pair<PointedGraph, std::vector<VertexId>>> out;
  std::mt19937_64 rng(5116);
  const auto seg = make_family(FamilyKind::segment, 8);
  const auto tree = make_family(FamilyKind::tree, 4);
  for (int i = 0; i < 50; ++i) {
    out.emplace_back(seg, oracle::random_subset(rng, non_base_vertices(seg)));
    out.emplace_back(tree, oracle::random_subset(rng, non_base_vertices(tree)));
  }
  for (int k = 1; k <= 4; ++k) out.emplace_back(tree, exhaustion_set(tree, ExhaustionRule::cumulative, k));
  return out;
}

Outcome rank_one_structure() {
  Outcome o;
  double worst = 0.0, worst_energy = 0.0;
  for (const auto& [pg, f] : truncation_instances()) {
    const auto t = build_truncation(gram_for(pg, f));
    worst = std::max(worst, rank1_residual(t));
    worst_energy = std::max(worst_energy, rank1_residual(t, truncated_laplacian_from_energy(pg, t)));
  }
  o.require(worst <= 1e-10, "rank-one residual");
  o.require(worst_energy <= 1e-10, "rank-one residual with energy-space pairing");
  o.detail << " 104 sections; max residual = " << worst << ", from energy pairing = " << worst_energy;
  return o;
}

Outcome onb_reconstruction() {
  Outcome o;
  double onb = 0.0, rec = 0.0;
  for (const auto& [pg, f] : truncation_instances()) {
    const auto m = gram_for(pg, f);
    const auto t = build_truncation(m);
    onb = std::max(onb, onb_gram_error(t, m));
    rec = std::max(rec, reconstruction_error(t, m));
  }
  o.require(onb <= 1e-10, "ONB Gram");
  o.require(rec <= 1e-10, "round-trip");
  o.detail << " max ONB Gram error = " << onb << ", max round-trip error = " << rec;
  return o;
}

Outcome dipole_solver() {
  Outcome o;
  std::mt19937_64 rng(3007);
  double residual = 0.0, riesz = 0.0, superposition = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto pg = random_pointed(rng, random_size(rng, 2, 60));
    const auto& g = pg.graph;
    const std::size_t n = g.vertex_count();
    const std::size_t xi = random_size(rng, 0, n - 1);
    std::size_t yi = random_size(rng, 0, n - 1);
    if (yi == xi) yi = (xi + 1) % n;
    const auto v = solve_dipole(g, pg.base, g.vertex(xi), g.vertex(yi));
    const auto lap = laplacian_vector(g, v);
    for (std::size_t i = 0; i < n; ++i)
      residual = std::max(residual, std::abs(lap[i] - (i == xi ? 1.0 : 0.0) + (i == yi ? 1.0 : 0.0)));

    const auto u = EnergyVector::pinned(g, pg.base, oracle::random_vector(rng, n));
    riesz = std::max(riesz, std::abs(energy_inner(v, u) - (u[xi] - u[yi])));

    ChargeDistribution w(g);
    const auto c = oracle::random_vector(rng, n);
    double total = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      w.add(g.vertex(i), c[i]);
      total += c[i];
    }
    w.add(g.vertex(0), -total);
    const auto a = solve_poisson(g, pg.base, w);
    const auto b = solve_poisson_direct(g, pg.base, w);
    for (std::size_t i = 0; i < n; ++i) superposition = std::max(superposition, std::abs(a[i] - b[i]));
  }
  o.require(residual <= 1e-12, "Poisson residual");
  o.require(riesz <= 1e-10, "Riesz property");
  o.require(superposition <= 1e-10, "decomposition vs direct");
  o.detail << " max residual = " << residual << ", Riesz = " << riesz << ", decomposition vs direct = " << superposition;
  return o;
}

Outcome dirac_identities() {
  Outcome o;
  std::mt19937_64 rng(3011);
  double worst = 0.0;
  bool psd = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto pg = random_pointed(rng, random_size(rng, 2, 30), 0.2);
    const auto& g = pg.graph;
    std::vector<EnergyVector> d;
    for (const auto& x : g.vertices()) d.push_back(dirac(g, pg.base, x));
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j)
        worst = std::max(worst, std::abs(energy_inner(d[i], d[j]) - (i == j ? g.mu(i) : -g.weight(i, j))));
    psd = psd && psd_check(dirac_gram(g)).is_psd;
  }
  o.require(worst <= 1e-12, "Dirac identities");
  o.require(psd, "Dirac Gram matrix PSD");
  o.detail << " 20 graphs; max error = " << worst;
  return o;
}

Outcome interlacing() {
  Outcome o;
  std::mt19937_64 rng(3019);
  const std::vector<PointedGraph> hosts{make_family(FamilyKind::segment, 8), make_family(FamilyKind::tree, 4),
                                        random_pointed(rng, 25, 0.1)};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& pg = hosts[trial % hosts.size()];
    const auto outer = oracle::random_subset(rng, non_base_vertices(pg), 0.6);
    const auto inner = oracle::random_subset(rng, outer, 0.5);
    const auto a = symmetric_eig(gram_for(pg, inner).entries);
    const auto b = symmetric_eig(gram_for(pg, outer).entries);
    worst = std::max({worst, b.min() - a.min(), a.max() - b.max()});
  }
  o.require(worst <= 1e-10, "interlacing");
  o.detail << " 100 nested pairs; max violation = " << worst;
  return o;
}

Outcome eigensolver_oracle() {
  Outcome o;
  std::mt19937_64 rng(3023);
  double roots = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_symmetric(rng, 2 + trial % 3);
    const auto d = symmetric_eig(a);
    const auto r = oracle::eigenvalues_by_bisection(a);
    if (r.size() != d.size()) {
      o.require(false, "root count");
      continue;
    }
    for (std::size_t k = 0; k < r.size(); ++k) roots = std::max(roots, std::abs(d.eigenvalues[k] - r[k]));
  }
  double residual = 0.0, ortho = 0.0;
  for (std::size_t n : {1u, 5u, 16u, 33u, 64u}) {
    const auto a = oracle::random_symmetric(rng, n, 4.0);
    const auto d = symmetric_eig(a);
    residual = std::max(residual, eig_residual(a, d) / std::max(1.0, inf_norm(a)));
    ortho = std::max(ortho, orthonormality_error(d));
  }
  o.require(roots <= 1e-8, "bisection roots");
  o.require(residual <= 1e-10, "eigen residual");
  o.require(ortho <= 1e-10, "orthonormality");
  o.detail << " max root error = " << roots << ", relative residual = " << residual << ", orthonormality = " << ortho;
  return o;
}

Outcome green_diagnostics() {
  Outcome o;
  double worst = 0.0;
  const auto tree = make_family(FamilyKind::tree, 7);
  for (const auto& x : exhaustion_set(tree, ExhaustionRule::cumulative, 5))
    worst = std::max(worst, greens_laplacian_check(tree, x).dipole_identity_residual);
  const auto seg = make_family(FamilyKind::segment, 8);
  for (long long x = -5; x <= 5; ++x)
    if (x != 0) worst = std::max(worst, greens_laplacian_check(seg, segment_vertex(x)).dipole_identity_residual);
  o.require(worst <= 1e-10, "dipole-form identity");

  const auto rep = greens_laplacian_check(seg, segment_vertex(2));
  const auto& at = row_at(rep, segment_vertex(2));
  const double stated = at.stated_residual.value_or(0.0);
  o.require(std::abs(std::abs(stated) - 1.0) <= 1e-12, "stated-identity residual at segment x=y=2 is 1");
  const auto trep = greens_laplacian_check(make_family(FamilyKind::tree, 3), VertexId("0"));
  const double ns = row_at(trep, tree_root()).neighbor_sum_residual;
  o.require(std::abs(std::abs(ns) - 1.0) <= 1e-12, "neighbour-sum residual at the tree base is 1");
  o.detail << " max dipole-identity residual = " << worst << "; stated-identity residual (segment, x=y=2) = " << stated
           << "; neighbour-sum residual (tree, x=0, y=∅) = " << ns;
  return o;
}

Outcome unboundedness_evidence() {
  Outcome o;
  const auto s = gap_sweep(make_family(FamilyKind::tree, 6), ExhaustionRule::level, 6);
  double worst = 0.0;
  for (const auto& r : s.rows) worst = std::max(worst, std::abs(r.sigma_est - (std::pow(2.0, r.k) - 1.0)));
  o.require(worst <= 1e-9, "sigma = 2^k - 1");
  o.require(s.sigma_strictly_increasing, "strictly increasing");
  o.require(s.no_bounded_inverse, "no-bounded-inverse flag");
  o.detail << " sigma_6 = " << s.rows.back().sigma_est << ", no_bounded_inverse = " << s.no_bounded_inverse;
  return o;
}

Outcome bessel_monotonicity() {
  Outcome o;
  int sequences = 0;
  double slack = -1e300;
  for (auto kind : {FamilyKind::tree, FamilyKind::segment}) {
    const int k = kind == FamilyKind::tree ? 5 : 8;
    const auto pg = make_family(kind, k);
    for (const auto& x : exhaustion_set(pg, ExhaustionRule::cumulative, 3)) {
      const auto s = symmetry_criterion(pg, x, ExhaustionRule::cumulative, k);
      o.require(s.nondecreasing, "nondecreasing at " + x.str());
      slack = std::max(slack, s.sup_estimate - mu_total(pg.graph, x));
      ++sequences;
    }
  }
  o.require(slack <= 1e-9, "bounded by mu(x)");
  std::mt19937_64 rng(3037);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  bool psd = true;
  double min_eig = 1e300;
  for (std::size_t n = 1; n <= 12; ++n) {
    std::vector<double> pts;
    while (pts.size() < n) {
      const double p = u(rng);
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    const auto r = psd_check(szego_gram(pts));
    psd = psd && r.is_psd;
    min_eig = std::min(min_eig, r.min_eigenvalue);
  }
  o.require(psd, "Szegő kernels PSD");
  o.detail << " " << sequences << " sequences; max (sup - mu(x)) = " << slack
           << "; Szegő sizes 1..12 min eigenvalue = " << min_eig;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"tree Gram tables", tree_gram_tables},
      {"tree spectra", tree_spectra},
      {"projected delta norms", projected_delta_norms},
      {"boundedness bound", boundedness_bound},
      {"segment kernel", segment_kernel},
      {"rank-one structure", rank_one_structure},
      {"ONB and reconstruction", onb_reconstruction},
      {"dipole solver", dipole_solver},
      {"Dirac identities", dirac_identities},
      {"interlacing", interlacing},
      {"eigensolver oracle", eigensolver_oracle},
      {"Green diagnostics", green_diagnostics},
      {"unboundedness evidence", unboundedness_evidence},
      {"Bessel monotonicity", bessel_monotonicity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::printf("%s %2zu %s:%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
