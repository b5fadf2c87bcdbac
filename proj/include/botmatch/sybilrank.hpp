#ifndef BOTMATCH_SYBILRANK_HPP
#define BOTMATCH_SYBILRANK_HPP

#include <bit>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/graph.hpp"

namespace botmatch {

struct TrustVector {
  std::vector<double> trust;
  int iterations = 0;
  std::vector<NodeId> seeds;
  std::vector<double> mass_history;  // Σ trust after each iteration
};

struct SybilRankResult {
  TrustVector state;
  std::vector<double> score;  // trust / degree
  EmbeddingSpace space;       // kind = ranked, D = 1
};

inline int default_sybilrank_iters(std::size_t n) {
  return n <= 1 ? 1 : static_cast<int>(std::bit_width(n - 1));  // ceil(log2 n)
}

/// Early-terminated trust propagation from suspicious seeds. Each seed starts
/// with 1/|seeds|; each round T'(v) = Σ_{u ∈ N(v)} T(u) / deg(u). Nodes without
/// neighbors keep their trust. Score is T(v) / deg(v) (T(v) when deg is 0);
/// higher means closer to the seeds.
inline SybilRankResult sybil_rank(const SymGraph& g, std::span<const NodeId> seeds,
                                  std::optional<int> iters = std::nullopt,
                                  bool weighted = false) {
  if (seeds.empty()) fail(ErrorKind::query, "SybilRank needs at least one seed");
  const std::size_t n = g.size();
  std::set<NodeId> unique(seeds.begin(), seeds.end());
  for (NodeId s : unique) {
    if (s >= n) fail(ErrorKind::query, "seed index " + std::to_string(s) + " not in graph");
  }
  SybilRankResult r;
  r.state.seeds.assign(unique.begin(), unique.end());
  r.state.iterations = iters.value_or(default_sybilrank_iters(n));
  if (r.state.iterations < 0) fail(ErrorKind::config, "SybilRank iterations must be >= 0");

  std::vector<double> deg(n);
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = weighted ? g.weighted_degree(v) : static_cast<double>(g.degree(v));
  }
  std::vector<double> t(n, 0.0);
  for (NodeId s : unique) t[s] = 1.0 / static_cast<double>(unique.size());

  std::vector<double> next(n);
  for (int it = 0; it < r.state.iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (NodeId u = 0; u < n; ++u) {
      if (t[u] == 0.0) continue;
      if (deg[u] == 0.0) {
        next[u] += t[u];
        continue;
      }
      for (const auto& a : g.neighbors(u)) {
        next[a.node] += t[u] * (weighted ? a.weight : 1.0) / deg[u];
      }
    }
    t.swap(next);
    double mass = 0.0;
    for (double x : t) mass += x;
    r.state.mass_history.push_back(mass);
  }
  r.state.trust = t;
  r.score.resize(n);
  for (NodeId v = 0; v < n; ++v) r.score[v] = deg[v] > 0.0 ? t[v] / deg[v] : t[v];

  r.space.name = "sybilrank";
  r.space.ids = g.index().ids();
  r.space.vectors.resize(static_cast<Eigen::Index>(n), 1);
  for (NodeId v = 0; v < n; ++v) r.space.vectors(v, 0) = r.score[v];
  r.space.kind = SpaceKind::ranked;
  r.space.validate();
  return r;
}

inline SybilRankResult sybil_rank(const SymGraph& g, std::span<const std::string> seed_ids,
                                  std::optional<int> iters = std::nullopt, bool weighted = false) {
  std::vector<NodeId> seeds;
  for (const auto& id : seed_ids) {
    auto v = g.find(id);
    if (!v) fail(ErrorKind::query, "seed '" + id + "' is not in the graph");
    seeds.push_back(*v);
  }
  return sybil_rank(g, std::span<const NodeId>(seeds), iters, weighted);
}

}  // namespace botmatch

#endif  // BOTMATCH_SYBILRANK_HPP
