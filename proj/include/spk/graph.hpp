#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spk/error.hpp"

namespace spk {

/// Opaque vertex token. Segment vertices are integer literals ("-3"), tree
/// vertices are binary words ("0110") with "∅" for the root.
class VertexId {
 public:
  VertexId() = default;
  explicit VertexId(std::string token) : token_(std::move(token)) {
    if (token_.empty()) throw InputError("vertex id must be non-empty");
  }
  explicit VertexId(const char* token) : VertexId(std::string(token)) {}

  const std::string& str() const { return token_; }

  auto operator<=>(const VertexId&) const = default;

 private:
  std::string token_;
};

inline const VertexId& tree_root() {
  static const VertexId root("∅");
  return root;
}

inline VertexId segment_vertex(long long n) { return VertexId(std::to_string(n)); }

}  // namespace spk

template <>
struct std::hash<spk::VertexId> {
  std::size_t operator()(const spk::VertexId& v) const noexcept { return std::hash<std::string>{}(v.str()); }
};

namespace spk {

struct Neighbor {
  std::size_t vertex;
  double weight;
};

/// Undirected edge, endpoints as vertex indices with u < v.
struct Edge {
  std::size_t u;
  std::size_t v;
  double weight;
};

/// Immutable weighted graph. Copies share the underlying storage, so a
/// graph handle can be held by value by the vectors that live on it.
class WeightedGraph {
  struct Impl {
    std::vector<VertexId> vertices;
    std::unordered_map<VertexId, std::size_t> index;
    std::vector<std::vector<Neighbor>> adjacency;  // sorted by neighbor index
    std::vector<Edge> edges;
    std::vector<double> mu;
  };

 public:
  class Builder {
   public:
    /// Declares a vertex; re-declaring an existing vertex is a no-op.
    std::size_t add_vertex(const VertexId& v) {
      auto [it, inserted] = index_.try_emplace(v, vertices_.size());
      if (inserted) vertices_.push_back(v);
      return it->second;
    }

    Builder& add_edge(const VertexId& a, const VertexId& b, double weight) {
      if (a == b) throw InputError("self-loop at vertex '" + a.str() + "'");
      if (!std::isfinite(weight) || weight <= 0.0)
        throw InputError("edge (" + a.str() + ", " + b.str() + ") has non-positive weight");
      const std::size_t i = add_vertex(a);
      const std::size_t j = add_vertex(b);
      const auto key = std::minmax(i, j);
      if (!edge_keys_.insert(key).second)
        throw InputError("duplicate edge (" + a.str() + ", " + b.str() + ")");
      edges_.push_back({key.first, key.second, weight});
      return *this;
    }

    WeightedGraph build() && {
      auto impl = std::make_shared<Impl>();
      impl->vertices = std::move(vertices_);
      impl->index = std::move(index_);
      impl->edges = std::move(edges_);
      impl->adjacency.resize(impl->vertices.size());
      impl->mu.assign(impl->vertices.size(), 0.0);
      for (const auto& e : impl->edges) {
        impl->adjacency[e.u].push_back({e.v, e.weight});
        impl->adjacency[e.v].push_back({e.u, e.weight});
        impl->mu[e.u] += e.weight;
        impl->mu[e.v] += e.weight;
      }
      for (auto& adj : impl->adjacency)
        std::sort(adj.begin(), adj.end(), [](const Neighbor& l, const Neighbor& r) { return l.vertex < r.vertex; });
      return WeightedGraph(std::move(impl));
    }

   private:
    std::vector<VertexId> vertices_;
    std::unordered_map<VertexId, std::size_t> index_;
    std::vector<Edge> edges_;
    std::set<std::pair<std::size_t, std::size_t>> edge_keys_;
  };

  WeightedGraph() : impl_(std::make_shared<Impl>()) {}

  std::size_t vertex_count() const { return impl_->vertices.size(); }
  std::size_t edge_count() const { return impl_->edges.size(); }
  const std::vector<VertexId>& vertices() const { return impl_->vertices; }
  const VertexId& vertex(std::size_t i) const { return impl_->vertices.at(i); }
  const std::vector<Edge>& edges() const { return impl_->edges; }
  const std::vector<Neighbor>& neighbors(std::size_t i) const { return impl_->adjacency.at(i); }

  bool contains(const VertexId& v) const { return impl_->index.contains(v); }

  std::optional<std::size_t> find(const VertexId& v) const {
    auto it = impl_->index.find(v);
    if (it == impl_->index.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const VertexId& v) const {
    auto it = impl_->index.find(v);
    if (it == impl_->index.end()) throw InputError("unknown vertex '" + v.str() + "'");
    return it->second;
  }

  /// Weight of the edge between i and j, or 0 when they are not adjacent.
  double weight(std::size_t i, std::size_t j) const {
    const auto& adj = impl_->adjacency.at(i);
    auto it = std::lower_bound(adj.begin(), adj.end(), j,
                               [](const Neighbor& n, std::size_t target) { return n.vertex < target; });
    return (it != adj.end() && it->vertex == j) ? it->weight : 0.0;
  }
  double weight(const VertexId& a, const VertexId& b) const { return weight(index_of(a), index_of(b)); }

  double mu(std::size_t i) const { return impl_->mu.at(i); }

  /// Identity of the underlying storage; two handles are the same host iff this matches.
  const void* identity() const { return impl_.get(); }
  bool same_host(const WeightedGraph& other) const { return impl_ == other.impl_; }

 private:
  explicit WeightedGraph(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline double mu_total(const WeightedGraph& g, const VertexId& x) { return g.mu(g.index_of(x)); }

/// Breadth-first hop distances from `start`; unreachable vertices get -1.
inline std::vector<long> hop_distances(const WeightedGraph& g, std::size_t start) {
  std::vector<long> dist(g.vertex_count(), -1);
  std::deque<std::size_t> queue{start};
  dist[start] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (const auto& nb : g.neighbors(u))
      if (dist[nb.vertex] < 0) {
        dist[nb.vertex] = dist[u] + 1;
        queue.push_back(nb.vertex);
      }
  }
  return dist;
}

/// The empty graph counts as connected.
inline bool is_connected(const WeightedGraph& g) {
  if (g.vertex_count() == 0) return true;
  const auto dist = hop_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](long d) { return d < 0; });
}

// ---------------------------------------------------------------------------
// Families and exhaustions

enum class FamilyKind { segment, tree, file };
enum class ExhaustionRule { level, cumulative };

inline std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::segment: return "segment";
    case FamilyKind::tree: return "tree";
    case FamilyKind::file: return "file";
  }
  return "?";
}

inline std::string to_string(ExhaustionRule r) { return r == ExhaustionRule::level ? "level" : "cumulative"; }

/// A graph together with its base point. `radius` is the instance size for
/// built-in families (segment: n, tree: depth) and unused for file graphs.
struct PointedGraph {
  WeightedGraph graph;
  VertexId base;
  FamilyKind kind = FamilyKind::file;
  int radius = 0;
};

/// Vertices -n..n with unit edges (j, j+1).
inline WeightedGraph make_segment(int n) {
  if (n < 1) throw InputError("segment size must be >= 1");
  WeightedGraph::Builder b;
  for (long long j = -n; j <= n; ++j) b.add_vertex(segment_vertex(j));
  for (long long j = -n; j < n; ++j) b.add_edge(segment_vertex(j), segment_vertex(j + 1), 1.0);
  return std::move(b).build();
}

/// Binary words of length <= depth, unit edges (x, x0) and (x, x1).
/// Vertices come out in length-then-lexicographic order.
inline WeightedGraph make_tree(int depth) {
  if (depth < 1) throw InputError("tree depth must be >= 1");
  if (depth > 20) throw InputError("tree depth must be <= 20");
  WeightedGraph::Builder b;
  std::vector<std::string> level{""};
  b.add_vertex(tree_root());
  for (int d = 1; d <= depth; ++d) {
    std::vector<std::string> next;
    next.reserve(level.size() * 2);
    for (const auto& w : level)
      for (char c : {'0', '1'}) next.push_back(w + c);
    for (const auto& w : next) b.add_vertex(VertexId(w));
    level = std::move(next);
  }
  level = {""};
  for (int d = 1; d <= depth; ++d) {
    std::vector<std::string> next;
    for (const auto& w : level)
      for (char c : {'0', '1'}) {
        const VertexId parent = w.empty() ? tree_root() : VertexId(w);
        b.add_edge(parent, VertexId(w + c), 1.0);
        next.push_back(w + c);
      }
    level = std::move(next);
  }
  return std::move(b).build();
}

inline PointedGraph make_family(FamilyKind kind, int size) {
  switch (kind) {
    case FamilyKind::segment: return {make_segment(size), segment_vertex(0), kind, size};
    case FamilyKind::tree: return {make_tree(size), tree_root(), kind, size};
    case FamilyKind::file: break;
  }
  throw InputError("make_family: file graphs are loaded, not generated");
}

inline bool is_tree_word(const VertexId& x) {
  const auto& s = x.str();
  return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

/// Word length of a tree vertex; the root has length 0.
inline int word_length(const VertexId& x) {
  if (x == tree_root()) return 0;
  if (!is_tree_word(x)) throw InputError("'" + x.str() + "' is not a binary word");
  return static_cast<int>(x.str().size());
}

inline long long segment_coordinate(const VertexId& x) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(x.str(), &pos);
  } catch (const std::exception&) {
    throw InputError("'" + x.str() + "' is not an integer vertex");
  }
  if (pos != x.str().size()) throw InputError("'" + x.str() + "' is not an integer vertex");
  return v;
}

/// Canonical form of a user-supplied vertex token for the given family.
inline VertexId canonical_vertex(FamilyKind kind, const std::string& token) {
  if (kind == FamilyKind::segment) return segment_vertex(segment_coordinate(VertexId(token)));
  if (kind == FamilyKind::tree && (token == "∅" || token == "root" || token == "e")) return tree_root();
  return VertexId(token);
}

/// F_k by hop distance from the base point: the level rule takes the shell
/// at distance exactly k, the cumulative rule the ball 1..k. On the tree this
/// is "words of length k" / "words of length <= k"; on the segment it is
/// {-k, k} / {-k..-1, 1..k}. Vertices are listed in graph order.
inline std::vector<VertexId> exhaustion_set(const PointedGraph& pg, ExhaustionRule rule, int k) {
  if (k < 1) throw InputError("exhaustion index must be >= 1");
  if (pg.kind != FamilyKind::file && k > pg.radius)
    throw InputError("exhaustion index " + std::to_string(k) + " exceeds the instance radius " +
                     std::to_string(pg.radius));
  const auto dist = hop_distances(pg.graph, pg.graph.index_of(pg.base));
  std::vector<VertexId> out;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const bool take = rule == ExhaustionRule::level ? dist[i] == k : (dist[i] >= 1 && dist[i] <= k);
    if (take) out.push_back(pg.graph.vertex(i));
  }
  return out;
}

/// Every vertex except the base point, in graph order.
inline std::vector<VertexId> non_base_vertices(const PointedGraph& pg) {
  std::vector<VertexId> out;
  for (const auto& v : pg.graph.vertices())
    if (v != pg.base) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// Paths on the tree

struct DirectedEdge {
  VertexId from;
  VertexId to;
  bool operator==(const DirectedEdge&) const = default;
};

using EdgePath = std::vector<DirectedEdge>;

/// The unique root path ∅ -> w1 -> w1w2 -> ... -> x.
inline EdgePath path_to_root(const WeightedGraph& g, const VertexId& x) {
  if (x == tree_root()) throw InputError("path_to_root: the root has an empty path");
  if (!g.contains(x)) throw InputError("unknown vertex '" + x.str() + "'");
  const int len = word_length(x);
  EdgePath path;
  path.reserve(len);
  VertexId prev = tree_root();
  for (int i = 1; i <= len; ++i) {
    VertexId cur(x.str().substr(0, i));
    if (g.weight(prev, cur) == 0.0) throw InputError("graph is not a tree-family instance");
    path.push_back({prev, cur});
    prev = std::move(cur);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Edge-list documents

struct EdgeListDocument {
  WeightedGraph graph;
  std::optional<VertexId> base;
};

/// Parses the edge-list text format: `#` comments, `vertex <id>`,
/// `base <id>`, and `<id> <id> <weight>` lines.
inline EdgeListDocument load_graph(std::string_view text) {
  WeightedGraph::Builder b;
  std::optional<VertexId> base;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const auto where = " (line " + std::to_string(lineno) + ")";
    if (tok[0] == "vertex") {
      if (tok.size() != 2) throw InputError("malformed vertex line" + where);
      b.add_vertex(VertexId(tok[1]));
    } else if (tok[0] == "base") {
      if (tok.size() != 2) throw InputError("malformed base line" + where);
      if (base) throw InputError("base declared twice" + where);
      base = VertexId(tok[1]);
    } else if (tok.size() == 3) {
      double w = 0.0;
      std::size_t pos = 0;
      try {
        w = std::stod(tok[2], &pos);
      } catch (const std::exception&) {
        throw InputError("malformed weight '" + tok[2] + "'" + where);
      }
      if (pos != tok[2].size()) throw InputError("malformed weight '" + tok[2] + "'" + where);
      try {
        b.add_edge(VertexId(tok[0]), VertexId(tok[1]), w);
      } catch (const InputError& e) {
        throw InputError(e.what() + where);
      }
    } else {
      throw InputError("malformed line" + where);
    }
  }
  if (base) b.add_vertex(*base);
  return {std::move(b).build(), base};
}

/// Edge-list text that load_graph reads back to the same graph.
inline std::string to_edge_list(const PointedGraph& pg) {
  std::ostringstream out;
  out.precision(17);
  out << "base " << pg.base.str() << '\n';
  for (std::size_t i = 0; i < pg.graph.vertex_count(); ++i)
    if (pg.graph.neighbors(i).empty()) out << "vertex " << pg.graph.vertex(i).str() << '\n';
  for (const auto& e : pg.graph.edges())
    out << pg.graph.vertex(e.u).str() << ' ' << pg.graph.vertex(e.v).str() << ' ' << e.weight << '\n';
  return out.str();
}

/// Wraps a loaded document; the base point is required for analyses.
inline PointedGraph pointed_from_document(EdgeListDocument doc) {
  if (!doc.base) throw InputError("graph file must declare a base point ('base <id>')");
  return {std::move(doc.graph), *doc.base, FamilyKind::file, 0};
}

}  // namespace spk
