#pragma once

// Command-line front end. `run` is separated from main() so the tests can
// drive it with in-memory streams.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "spk/spk.hpp"

namespace spk::cli {

enum ExitCode : int { ok = 0, usage_error = 1, contract_violation = 2 };

struct RunConfig {
  std::string command;
  std::optional<std::string> family;
  std::optional<std::string> graph_file;
  std::optional<int> size;  // --n / --levels
  std::optional<std::string> base;
  std::string rule = "cumulative";
  std::optional<int> max_k;
  std::optional<std::string> x;
  std::optional<std::string> y;
  std::optional<std::string> charge_file;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<int> radius;
  std::vector<double> points;
  std::string method = "closed";
  double tol_eig = 1e-10;
  double tol_psd = 1e-10;
  double tol_rank1 = 1e-10;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline FamilyKind family_kind(const std::string& name) {
  if (name == "segment") return FamilyKind::segment;
  if (name == "tree") return FamilyKind::tree;
  throw InputError("unknown family '" + name + "'");
}

inline ExhaustionRule exhaustion_rule(const std::string& name) {
  if (name == "level") return ExhaustionRule::level;
  if (name == "cumulative") return ExhaustionRule::cumulative;
  throw InputError("unknown exhaustion rule '" + name + "'");
}

inline TableFormat table_format(const RunConfig& c) {
  return c.format.value_or("csv") == "json" ? TableFormat::json : TableFormat::csv;
}

/// Canonicalizes a vertex token against the input source.
inline VertexId vertex_arg(const RunConfig& c, const std::string& token) {
  if (c.family) return canonical_vertex(family_kind(*c.family), token);
  return VertexId(token);
}

/// Smallest family instance that covers the requested vertices and sweep depth.
inline int default_size(const RunConfig& c, FamilyKind kind) {
  int size = c.max_k.value_or(1);
  for (const auto& tok : {c.x, c.y}) {
    if (!tok) continue;
    const VertexId v = canonical_vertex(kind, *tok);
    if (kind == FamilyKind::tree && v != tree_root()) size = std::max(size, word_length(v) + 1);
    if (kind == FamilyKind::segment && v != segment_vertex(0))
      size = std::max(size, static_cast<int>(std::llabs(segment_coordinate(v))) + 2);
  }
  if (c.radius) size = std::max(size, *c.radius);
  return size;
}

inline PointedGraph instance(const RunConfig& c) {
  if (c.family.has_value() == c.graph_file.has_value())
    throw InputError("exactly one of --family or --graph is required");
  if (c.family) {
    const FamilyKind kind = family_kind(*c.family);
    auto pg = make_family(kind, c.size.value_or(default_size(c, kind)));
    if (c.base && canonical_vertex(kind, *c.base) != pg.base)
      throw InputError("the " + *c.family + " family has a fixed base point " + pg.base.str());
    return pg;
  }
  auto doc = load_graph(read_file(*c.graph_file));
  if (c.base) doc.base = VertexId(*c.base);
  auto pg = pointed_from_document(std::move(doc));
  pg.graph.index_of(pg.base);
  return pg;
}

/// F from --rule/--K when K is given, otherwise every non-base vertex.
inline std::vector<VertexId> index_set(const RunConfig& c, const PointedGraph& pg) {
  if (!c.max_k) return non_base_vertices(pg);
  auto f = exhaustion_set(pg, exhaustion_rule(c.rule), *c.max_k);
  if (f.empty()) throw InputError("exhaustion set is empty; enlarge the instance");
  return f;
}

inline KernelMatrix kernel(const RunConfig& c, const PointedGraph& pg) {
  const auto f = index_set(c, pg);
  if (c.method == "energy") return gram_from_energy(pg, f);
  if (c.method != "closed") throw InputError("unknown --method '" + c.method + "'");
  return gram_for(pg, f);
}

inline nlohmann::ordered_json meta(const RunConfig& c) {
  nlohmann::ordered_json m;
  m["command"] = c.command;
  m["tolerances"] = {{"eig", c.tol_eig}, {"psd", c.tol_psd}, {"rank1", c.tol_rank1}};
  return m;
}

struct Output {
  std::string text;
  nlohmann::ordered_json meta;
  std::optional<std::string> violation;
};

inline std::string kernel_csv(const KernelMatrix& m) {
  Table t;
  t.columns.push_back("");
  t.columns.insert(t.columns.end(), m.labels.begin(), m.labels.end());
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<Cell> row{m.labels[i]};
    for (std::size_t j = 0; j < m.size(); ++j) row.emplace_back(m(i, j));
    t.add_row(std::move(row));
  }
  return to_csv(t);
}

inline std::string kernel_json(const KernelMatrix& m) {
  std::string out = "{\"labels\": " + nlohmann::json(m.labels).dump() + ",\n \"rows\": [";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i ? ",\n  [" : "\n  [";
    for (std::size_t j = 0; j < m.size(); ++j) out += (j ? ", " : "") + format_number(m(i, j));
    out += "]";
  }
  return out + "\n ]}\n";
}

// --- commands --------------------------------------------------------------

inline Output cmd_gen(const RunConfig& c) {
  const auto pg = instance(c);
  Output o{"", meta(c), {}};
  if (!c.format) {
    o.text = to_edge_list(pg);
    return o;
  }
  Table t{{"u", "v", "weight"}, {}};
  for (const auto& e : pg.graph.edges())
    t.add_row({pg.graph.vertex(e.u).str(), pg.graph.vertex(e.v).str(), e.weight});
  o.text = emit_table(t, table_format(c));
  return o;
}

inline Output cmd_gram(const RunConfig& c) {
  const auto pg = instance(c);
  const auto m = kernel(c, pg);
  return {table_format(c) == TableFormat::csv ? kernel_csv(m) : kernel_json(m), meta(c), {}};
}

inline Output cmd_spec(const RunConfig& c) {
  const auto pg = instance(c);
  const auto m = kernel(c, pg);
  const auto d = symmetric_eig(m.entries);
  Output o{"", meta(c), {}};
  const double res = eig_residual(m.entries, d);
  o.meta["eig_residual"] = res;
  o.meta["sweeps"] = d.sweeps;
  if (res > c.tol_eig * std::max(1.0, inf_norm(m.entries))) o.violation = "eigen residual above tolerance";
  Table t{{"index", "eigenvalue"}, {}};
  for (std::size_t k = 0; k < d.size(); ++k) t.add_row({static_cast<std::int64_t>(k), d.eigenvalues[k]});
  o.text = emit_table(t, table_format(c));
  return o;
}

inline Output cmd_truncate(const RunConfig& c) {
  const auto pg = instance(c);
  const auto m = kernel(c, pg);
  const auto t = build_truncation(m, c.tol_psd);
  const auto p = project_delta(t);
  Output o{"", meta(c), {}};
  const double r1 = rank1_residual(t);
  const double onb = onb_gram_error(t, m);
  o.meta["n_F"] = m.size();
  o.meta["rank"] = t.rank();
  o.meta["proj_delta_normsq"] = p.norm_squared;
  o.meta["rank1_residual"] = r1;
  o.meta["onb_error"] = onb;
  o.meta["warnings"] = t.warnings;
  if (r1 > c.tol_rank1) o.violation = "rank-one residual above tolerance";
  if (onb > c.tol_rank1) o.violation = "ONB Gram error above tolerance";
  Table tab{{"index", "lambda", "inv_lambda", "chi_overlap", "proj_delta_coeff"}, {}};
  for (std::size_t j = 0; j < t.rank(); ++j)
    tab.add_row({static_cast<std::int64_t>(j), t.lambdas[j], t.inverse_lambdas[j], t.chi_overlap[j],
                 t.delta_coeffs[j]});
  o.text = emit_table(tab, table_format(c));
  return o;
}

inline Table sweep_table(const SweepResult& s) {
  Table t{{"k", "n_F", "min_lambda", "max_lambda", "gap_est", "sigma_est", "proj_delta_normsq", "bound_5_28"}, {}};
  for (const auto& r : s.rows)
    t.add_row({static_cast<std::int64_t>(r.k), static_cast<std::int64_t>(r.n_f), r.min_lambda, r.max_lambda,
               r.gap_est, r.sigma_est, r.proj_delta_normsq, r.norm_bound});
  return t;
}

inline Output cmd_sweep(const RunConfig& c) {
  if (!c.max_k || *c.max_k < 1) throw InputError("sweep needs --K >= 1");
  const auto pg = instance(c);
  const auto rule = exhaustion_rule(c.rule);
  const auto s = gap_sweep(pg, rule, *c.max_k);
  Output o{emit_table(sweep_table(s), table_format(c)), meta(c), {}};
  o.meta["rule"] = to_string(rule);
  o.meta["estimates"] = "gap_est and sigma_est are running extremes over the sweep, not proven limits";
  o.meta["extremes_monotone"] = s.extremes_monotone;
  o.meta["sigma_strictly_increasing"] = s.sigma_strictly_increasing;
  o.meta["no_bounded_inverse"] = s.no_bounded_inverse;
  if (rule == ExhaustionRule::cumulative && !s.extremes_monotone)
    o.violation = "eigenvalue extremes are not monotone along a nested exhaustion";
  return o;
}

inline Output cmd_dipole(const RunConfig& c) {
  const auto pg = instance(c);
  std::optional<EnergyVector> v;
  std::vector<double> charge(pg.graph.vertex_count(), 0.0);
  if (c.charge_file) {
    const auto w = charge_from_json(pg.graph, nlohmann::json::parse(read_file(*c.charge_file)));
    v = solve_poisson(pg.graph, pg.base, w);
    charge.assign(w.values().begin(), w.values().end());
  } else {
    if (!c.x) throw InputError("dipole needs --x or --charge");
    const VertexId x = vertex_arg(c, *c.x);
    const VertexId y = c.y ? vertex_arg(c, *c.y) : pg.base;
    v = solve_dipole(pg.graph, pg.base, x, y);
    charge[pg.graph.index_of(x)] += 1.0;
    charge[pg.graph.index_of(y)] -= 1.0;
  }
  Output o{"", meta(c), {}};
  const auto lap = laplacian_vector(pg.graph, *v);
  double res = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i) res = std::max(res, std::abs(lap[i] - charge[i]));
  o.meta["residual"] = res;
  if (res > 1e-10) o.violation = "Poisson residual above tolerance";
  Table t{{"vertex", "value"}, {}};
  for (std::size_t i = 0; i < v->size(); ++i) t.add_row({pg.graph.vertex(i).str(), (*v)[i]});
  o.text = emit_table(t, table_format(c));
  return o;
}

inline Output cmd_green(const RunConfig& c) {
  if (!c.x) throw InputError("green needs --x");
  RunConfig sized = c;
  if (c.radius) sized.size = *c.radius;
  const auto pg = instance(sized);
  const auto rep = greens_laplacian_check(pg, vertex_arg(c, *c.x));
  Output o{"", meta(c), {}};
  o.meta["dipole_identity_residual"] = rep.dipole_identity_residual;
  o.meta["stated_identity_residual"] = rep.stated_identity_residual;
  o.meta["neighbor_sum_identity_residual"] = rep.neighbor_sum_identity_residual;
  if (rep.dipole_identity_residual > c.tol_eig) o.violation = "dipole-form Green identity residual above tolerance";
  if (table_format(c) == TableFormat::json) {
    o.text = to_json(rep).dump(1) + "\n";
    return o;
  }
  Table t{{"vertex", "kernel", "laplacian", "dipole_residual", "stated_residual", "neighbor_sum_residual"}, {}};
  for (const auto& r : rep.rows)
    t.add_row({r.y.str(), r.kernel, r.laplacian, r.dipole_residual,
               r.stated_residual ? Cell(*r.stated_residual) : Cell(std::monostate{}), r.neighbor_sum_residual});
  o.text = to_csv(t);
  return o;
}

inline Output cmd_psdcheck(const RunConfig& c) {
  KernelMatrix m;
  if (!c.points.empty()) {
    if (c.family || c.graph_file) throw InputError("--points excludes --family/--graph");
    m = szego_gram(c.points);
  } else {
    m = kernel(c, instance(c));
  }
  const auto r = psd_check(m, c.tol_psd);
  Output o{"", meta(c), {}};
  if (!r.is_psd) o.violation = "matrix is not positive semidefinite";
  Table t{{"n", "is_psd", "min_eigenvalue", "max_eigenvalue"}, {}};
  t.add_row({static_cast<std::int64_t>(m.size()), std::string(r.is_psd ? "true" : "false"), r.min_eigenvalue,
             r.max_eigenvalue});
  o.text = emit_table(t, table_format(c));
  return o;
}

inline Output cmd_criterion(const RunConfig& c) {
  if (!c.x) throw InputError("criterion needs --x");
  if (!c.max_k || *c.max_k < 1) throw InputError("criterion needs --K >= 1");
  const auto pg = instance(c);
  const VertexId x = vertex_arg(c, *c.x);
  const auto rule = exhaustion_rule(c.rule);
  const auto s = symmetry_criterion(pg, x, rule, *c.max_k);
  const double bound = mu_total(pg.graph, x);
  Output o{"", meta(c), {}};
  o.meta["sup_estimate"] = s.sup_estimate;
  o.meta["nondecreasing"] = s.nondecreasing;
  o.meta["bound_mu_x"] = bound;
  if (rule == ExhaustionRule::cumulative && !s.nondecreasing) o.violation = "criterion sequence decreased";
  if (s.sup_estimate > bound + 1e-9) o.violation = "criterion sequence exceeds mu(x)";
  Table t{{"k", "s_k", "bound"}, {}};
  for (std::size_t k = 0; k < s.values.size(); ++k)
    t.add_row({static_cast<std::int64_t>(k + 1), s.values[k], bound});
  o.text = emit_table(t, table_format(c));
  return o;
}

inline void add_source_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--family", c.family, "Built-in graph family")->check(CLI::IsMember({"segment", "tree"}));
  sub->add_option("--graph", c.graph_file, "Edge-list file");
  sub->add_option("--n,--levels", c.size, "Family instance size (segment n / tree depth)")->check(CLI::PositiveNumber);
  sub->add_option("--base", c.base, "Base point");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "Write output to this path instead of stdout");
  sub->add_option("--tol-eig", c.tol_eig, "Eigen/identity residual tolerance");
  sub->add_option("--tol-psd", c.tol_psd, "PSD / null-space clamp tolerance");
}

inline void add_index_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--rule", c.rule, "Exhaustion rule")->check(CLI::IsMember({"level", "cumulative"}));
  sub->add_option("--K", c.max_k, "Exhaustion index");
  sub->add_option("--method", c.method, "Gram construction: closed or energy")
      ->check(CLI::IsMember({"closed", "energy"}));
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  RunConfig c;
  CLI::App app{"Spectral truncation analysis of graph Laplacians on weighted graphs", "spk"};
  app.require_subcommand(1);

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"gen", "Generate a family instance as an edge list"},
      {"gram", "Gram kernel matrix M_F"},
      {"spec", "Eigenvalues of M_F"},
      {"truncate", "ONB, projected delta and rank-one check for one F"},
      {"sweep", "Gap / sigma sweep over an exhaustion"},
      {"dipole", "Solve a dipole or Poisson problem"},
      {"green", "Green-kernel identity residuals"},
      {"psdcheck", "Positive-semidefiniteness check"},
      {"criterion", "Symmetry-criterion sequence for a vertex"},
  };
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_source_options(sub, c);
    const std::string name = s.name;
    if (name != "gen" && name != "dipole" && name != "green") add_index_options(sub, c);
    if (name == "dipole" || name == "green" || name == "criterion") sub->add_option("--x", c.x, "Vertex x");
    if (name == "dipole") {
      sub->add_option("--y", c.y, "Vertex y (defaults to the base point)");
      sub->add_option("--charge", c.charge_file, "Charge distribution JSON");
    }
    if (name == "green") sub->add_option("--radius", c.radius, "Instance radius")->check(CLI::PositiveNumber);
    if (name == "truncate") sub->add_option("--tol-rank1", c.tol_rank1, "Rank-one identity tolerance");
    if (name == "psdcheck") sub->add_option("--points", c.points, "Szegő kernel sample points in [0,1)");
  }

  std::vector<const char*> argv{"spk"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << nlohmann::json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return usage_error;
  }
  for (const auto* sub : app.get_subcommands()) c.command = sub->get_name();

  Output result;
  try {
    if (c.command == "gen") result = cmd_gen(c);
    else if (c.command == "gram") result = cmd_gram(c);
    else if (c.command == "spec") result = cmd_spec(c);
    else if (c.command == "truncate") result = cmd_truncate(c);
    else if (c.command == "sweep") result = cmd_sweep(c);
    else if (c.command == "dipole") result = cmd_dipole(c);
    else if (c.command == "green") result = cmd_green(c);
    else if (c.command == "psdcheck") result = cmd_psdcheck(c);
    else if (c.command == "criterion") result = cmd_criterion(c);
    else throw InputError("unknown command '" + c.command + "'");
  } catch (const ContractViolation& e) {
    err << nlohmann::json{{"error", "contract"}, {"message", e.what()}}.dump() << '\n';
    return contract_violation;
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return usage_error;
  }

  if (c.out) {
    std::ofstream f(*c.out, std::ios::binary);
    if (!f || !(f << result.text) || !f.flush()) {
      err << nlohmann::json{{"error", "usage"}, {"message", "cannot write '" + *c.out + "'"}}.dump() << '\n';
      return usage_error;
    }
  } else {
    out << result.text;
  }
  err << result.meta.dump() << '\n';
  if (result.violation) {
    err << nlohmann::json{{"error", "contract"}, {"message", *result.violation}}.dump() << '\n';
    return contract_violation;
  }
  return ok;
}

}  // namespace spk::cli
