#ifndef BOTMATCH_GRAPH_HPP
#define BOTMATCH_GRAPH_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "botmatch/error.hpp"
#include "botmatch/ingest.hpp"

namespace botmatch {

using NodeId = std::uint32_t;

struct TypedArc {
  NodeId node;
  EdgeType type;
  std::uint64_t weight;
};

struct WeightedArc {
  NodeId node;
  double weight;
  bool operator==(const WeightedArc&) const = default;
};

struct IndexedEdge {
  NodeId source;
  NodeId target;
  EdgeType type;
  std::uint64_t weight;
  bool operator==(const IndexedEdge&) const = default;
};

/// Dense 0..N-1 indexing of account ids, sorted by id.
class NodeIndex {
 public:
  NodeIndex() = default;
  explicit NodeIndex(std::vector<std::string> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    lookup_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) lookup_.emplace(ids_[i], static_cast<NodeId>(i));
  }

  std::size_t size() const { return ids_.size(); }
  const std::string& id(NodeId i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const { return ids_; }

  std::optional<NodeId> find(std::string_view id) const {
    auto it = lookup_.find(std::string(id));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeId> lookup_;
};

namespace detail {

inline std::vector<std::vector<WeightedArc>> collapse(
    const std::vector<std::vector<TypedArc>>& typed) {
  std::vector<std::vector<WeightedArc>> out(typed.size());
  for (std::size_t u = 0; u < typed.size(); ++u) {
    std::map<NodeId, double> merged;
    for (const auto& a : typed[u]) merged[a.node] += static_cast<double>(a.weight);
    out[u].reserve(merged.size());
    for (const auto& [v, w] : merged) out[u].push_back({v, w});
  }
  return out;
}

}  // namespace detail

/// Immutable directed multigraph with typed, weighted edges. Parallel edges of
/// different types between the same pair are kept; the collapsed view merges
/// them by summing weights.
class CommGraph {
 public:
  CommGraph() = default;

  static CommGraph from_edges(const std::vector<std::string>& account_ids,
                              const std::vector<EdgeRecord>& edges) {
    CommGraph g;
    g.index_ = NodeIndex(account_ids);
    std::vector<IndexedEdge> indexed;
    indexed.reserve(edges.size());
    for (const auto& e : edges) {
      auto s = g.index_.find(e.source);
      auto t = g.index_.find(e.target);
      if (!s || !t) {
        fail(ErrorKind::construction, "edge " + e.source + " -> " + e.target +
                                          " references an unknown account");
      }
      indexed.push_back({*s, *t, e.edge_type, e.weight});
    }
    g.build(std::move(indexed));
    return g;
  }

  static CommGraph from_edges(const std::vector<AccountRecord>& accounts,
                              const std::vector<EdgeRecord>& edges) {
    std::vector<std::string> ids;
    ids.reserve(accounts.size());
    for (const auto& a : accounts) ids.push_back(a.account_id);
    return from_edges(ids, edges);
  }

  /// Graph over already-indexed nodes; `ids` must be sorted and unique.
  static CommGraph from_indexed(std::vector<std::string> ids, std::vector<IndexedEdge> edges) {
    CommGraph g;
    const std::size_t n = ids.size();
    g.index_ = NodeIndex(ids);
    if (g.index_.ids() != ids) fail(ErrorKind::construction, "account ids must be sorted and unique");
    for (const auto& e : edges) {
      if (e.source >= n || e.target >= n) fail(ErrorKind::construction, "edge index out of range");
    }
    g.build(std::move(edges));
    return g;
  }

  std::size_t size() const { return index_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const NodeIndex& index() const { return index_; }
  const std::string& id(NodeId i) const { return index_.id(i); }
  std::optional<NodeId> find(std::string_view id) const { return index_.find(id); }

  std::span<const TypedArc> out(NodeId u) const { return out_[u]; }
  std::span<const TypedArc> in(NodeId u) const { return in_[u]; }
  std::span<const WeightedArc> collapsed_out(NodeId u) const { return collapsed_out_[u]; }
  std::span<const WeightedArc> collapsed_in(NodeId u) const { return collapsed_in_[u]; }
  std::size_t out_degree(NodeId u) const { return out_[u].size(); }
  std::size_t in_degree(NodeId u) const { return in_[u].size(); }

  /// Typed edges sorted by (source, target, type).
  const std::vector<IndexedEdge>& edges() const { return edges_; }

  std::vector<EdgeRecord> edge_records() const {
    std::vector<EdgeRecord> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({id(e.source), id(e.target), e.type, e.weight});
    return out;
  }

 private:
  void build(std::vector<IndexedEdge> edges) {
    std::sort(edges.begin(), edges.end(), [](const IndexedEdge& a, const IndexedEdge& b) {
      return std::tie(a.source, a.target, a.type) < std::tie(b.source, b.target, b.type);
    });
    // Merge duplicates of the same (source, target, type) and drop self-loops.
    std::vector<IndexedEdge> merged;
    for (const auto& e : edges) {
      if (e.source == e.target || e.weight == 0) continue;
      if (!merged.empty() && merged.back().source == e.source &&
          merged.back().target == e.target && merged.back().type == e.type) {
        merged.back().weight += e.weight;
      } else {
        merged.push_back(e);
      }
    }
    edges_ = std::move(merged);
    const std::size_t n = index_.size();
    out_.assign(n, {});
    in_.assign(n, {});
    for (const auto& e : edges_) {
      out_[e.source].push_back({e.target, e.type, e.weight});
      in_[e.target].push_back({e.source, e.type, e.weight});
    }
    collapsed_out_ = detail::collapse(out_);
    collapsed_in_ = detail::collapse(in_);
  }

  NodeIndex index_;
  std::vector<IndexedEdge> edges_;
  std::vector<std::vector<TypedArc>> out_, in_;
  std::vector<std::vector<WeightedArc>> collapsed_out_, collapsed_in_;
};

/// Undirected weighted view of a CommGraph.
class SymGraph {
 public:
  SymGraph() = default;

  SymGraph(NodeIndex index, std::vector<std::vector<WeightedArc>> adj)
      : index_(std::move(index)), adj_(std::move(adj)) {
    for (auto& row : adj_) {
      std::sort(row.begin(), row.end(),
                [](const WeightedArc& a, const WeightedArc& b) { return a.node < b.node; });
      edge_endpoints_ += row.size();
    }
  }

  std::size_t size() const { return index_.size(); }
  /// Number of undirected pairs.
  std::size_t edge_count() const { return edge_endpoints_ / 2; }
  const NodeIndex& index() const { return index_; }
  const std::string& id(NodeId i) const { return index_.id(i); }
  std::optional<NodeId> find(std::string_view id) const { return index_.find(id); }

  std::span<const WeightedArc> neighbors(NodeId u) const { return adj_[u]; }
  std::size_t degree(NodeId u) const { return adj_[u].size(); }

  double weighted_degree(NodeId u) const {
    double s = 0.0;
    for (const auto& a : adj_[u]) s += a.weight;
    return s;
  }

  bool has_edge(NodeId u, NodeId v) const {
    const auto& row = adj_[u];
    return std::binary_search(row.begin(), row.end(), WeightedArc{v, 0.0},
                              [](const WeightedArc& a, const WeightedArc& b) { return a.node < b.node; });
  }

  bool operator==(const SymGraph& o) const {
    return index_.ids() == o.index_.ids() && adj_ == o.adj_;
  }

 private:
  NodeIndex index_;
  std::vector<std::vector<WeightedArc>> adj_;
  std::size_t edge_endpoints_ = 0;
};

/// weight(u, v) = w(u->v) + w(v->u) over the collapsed view.
inline SymGraph symmetrize(const CommGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::map<NodeId, double>> acc(n);
  for (NodeId u = 0; u < n; ++u) {
    for (const auto& a : g.collapsed_out(u)) {
      acc[u][a.node] += a.weight;
      acc[a.node][u] += a.weight;
    }
  }
  std::vector<std::vector<WeightedArc>> adj(n);
  for (NodeId u = 0; u < n; ++u) {
    for (const auto& [v, w] : acc[u]) adj[u].push_back({v, w});
  }
  return SymGraph(g.index(), std::move(adj));
}

inline SymGraph symmetrize(const SymGraph& g) { return g; }

/// Builds an undirected graph from index pairs; duplicate pairs sum weights.
inline SymGraph sym_from_pairs(std::vector<std::string> ids,
                               const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  const std::size_t n = ids.size();
  std::vector<std::map<NodeId, double>> acc(n);
  for (auto [u, v] : pairs) {
    if (u >= n || v >= n) fail(ErrorKind::construction, "edge index out of range");
    if (u == v) continue;
    acc[u][v] += 1.0;
    acc[v][u] += 1.0;
  }
  std::vector<std::vector<WeightedArc>> adj(n);
  for (NodeId u = 0; u < n; ++u) {
    for (const auto& [v, w] : acc[u]) adj[u].push_back({v, w});
  }
  NodeIndex index(ids);
  if (index.ids() != ids) fail(ErrorKind::construction, "account ids must be sorted and unique");
  return SymGraph(std::move(index), std::move(adj));
}

inline constexpr std::size_t kDefaultDenseCap = 10'000;

/// A[i][j] = collapsed weight of i -> j.
inline Eigen::MatrixXd dense_adjacency(const CommGraph& g,
                                       std::size_t cap = kDefaultDenseCap) {
  if (g.size() > cap) {
    fail(ErrorKind::size, "graph has " + std::to_string(g.size()) +
                              " nodes, dense cap is " + std::to_string(cap));
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u = 0; u < g.size(); ++u) {
    for (const auto& arc : g.collapsed_out(u)) a(u, arc.node) = arc.weight;
  }
  return a;
}

inline Eigen::MatrixXd dense_adjacency(const SymGraph& g, std::size_t cap = kDefaultDenseCap) {
  if (g.size() > cap) {
    fail(ErrorKind::size, "graph has " + std::to_string(g.size()) +
                              " nodes, dense cap is " + std::to_string(cap));
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u = 0; u < g.size(); ++u) {
    for (const auto& arc : g.neighbors(u)) a(u, arc.node) = arc.weight;
  }
  return a;
}

// Binary snapshot: "BMG1", u64 N, u64 E, E edge triples of little-endian u64
// (source, target, weight << 8 | type), then N ids as u32 length + bytes.
namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 4);
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) fail(ErrorKind::format, "truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) fail(ErrorKind::format, "truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

}  // namespace detail

inline void write_snapshot(std::ostream& out, const CommGraph& g) {
  out.write("BMG1", 4);
  detail::put_u64(out, g.size());
  detail::put_u64(out, g.edge_count());
  for (const auto& e : g.edges()) {
    detail::put_u64(out, e.source);
    detail::put_u64(out, e.target);
    detail::put_u64(out, (e.weight << 8) | static_cast<std::uint64_t>(e.type));
  }
  for (const auto& id : g.index().ids()) {
    detail::put_u32(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  if (!out) fail(ErrorKind::io, "failed writing graph snapshot");
}

inline CommGraph read_snapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "BMG1") {
    fail(ErrorKind::format, "not a BMG1 graph snapshot");
  }
  const std::uint64_t n = detail::get_u64(in);
  const std::uint64_t m = detail::get_u64(in);
  std::vector<IndexedEdge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    const auto s = detail::get_u64(in);
    const auto t = detail::get_u64(in);
    const auto packed = detail::get_u64(in);
    const auto type = packed & 0xFF;
    if (s >= n || t >= n || type > 2) fail(ErrorKind::format, "corrupt edge in snapshot");
    edges.push_back({static_cast<NodeId>(s), static_cast<NodeId>(t),
                     static_cast<EdgeType>(type), packed >> 8});
  }
  std::vector<std::string> ids(n);
  for (auto& id : ids) {
    const auto len = detail::get_u32(in);
    id.resize(len);
    if (len && !in.read(id.data(), len)) fail(ErrorKind::format, "truncated snapshot ids");
  }
  return CommGraph::from_indexed(std::move(ids), std::move(edges));
}

}  // namespace botmatch

#endif  // BOTMATCH_GRAPH_HPP
