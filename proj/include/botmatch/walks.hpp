#ifndef BOTMATCH_WALKS_HPP
#define BOTMATCH_WALKS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "botmatch/error.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/random.hpp"

namespace botmatch {

struct WalkOptions {
  int walks_per_node = 10;
  int walk_length = 80;
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 0;
  bool weighted = false;
};

struct WalkCorpus {
  std::vector<std::vector<NodeId>> walks;
  int walk_length = 0;
  int walks_per_node = 0;
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 0;
};

struct Transition {
  NodeId node;
  double probability;
};

/// Next-hop distribution of a second-order walk currently at `cur` having
/// arrived from `prev`. Unnormalized weights: 1/p to return to prev, 1 for
/// neighbors of prev, 1/q otherwise; multiplied by the edge weight when
/// `weighted`. Without `prev` (first step) the distribution is first order.
inline std::vector<Transition> transition_probabilities(const SymGraph& g,
                                                        std::optional<NodeId> prev, NodeId cur,
                                                        double p, double q, bool weighted) {
  std::vector<Transition> out;
  const auto nbrs = g.neighbors(cur);
  out.reserve(nbrs.size());
  double total = 0.0;
  for (const auto& arc : nbrs) {
    double w = weighted ? arc.weight : 1.0;
    if (prev) {
      if (arc.node == *prev) {
        w /= p;
      } else if (!g.has_edge(*prev, arc.node)) {
        w /= q;
      }
    }
    out.push_back({arc.node, w});
    total += w;
  }
  for (auto& t : out) t.probability /= total;
  return out;
}

namespace detail {

inline NodeId sample_next(const SymGraph& g, std::optional<NodeId> prev, NodeId cur,
                          const WalkOptions& opt, Rng& rng, std::vector<double>& cumulative) {
  const auto nbrs = g.neighbors(cur);
  const bool uniform = !opt.weighted && (!prev || (opt.p == 1.0 && opt.q == 1.0));
  if (uniform) return nbrs[uniform_index(rng, nbrs.size())].node;
  cumulative.resize(nbrs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    double w = opt.weighted ? nbrs[i].weight : 1.0;
    if (prev) {
      if (nbrs[i].node == *prev) {
        w /= opt.p;
      } else if (!g.has_edge(*prev, nbrs[i].node)) {
        w /= opt.q;
      }
    }
    total += w;
    cumulative[i] = total;
  }
  const double u = uniform01(rng) * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                         nbrs.size() - 1);
  return nbrs[idx].node;
}

}  // namespace detail

/// node2vec walks. Walk j of root v uses its own RNG stream, so the corpus
/// is independent of traversal order. Walks are ordered repetition-major
/// (all roots for repetition 0, then repetition 1, ...). A walk stops early
/// at a node without neighbors.
inline WalkCorpus sample_walks(const SymGraph& g, const WalkOptions& opt) {
  if (opt.walks_per_node < 1 || opt.walk_length < 1) {
    fail(ErrorKind::config, "walks_per_node and walk_length must be >= 1");
  }
  if (!(opt.p > 0.0) || !(opt.q > 0.0)) fail(ErrorKind::config, "p and q must be positive");
  WalkCorpus corpus;
  corpus.walk_length = opt.walk_length;
  corpus.walks_per_node = opt.walks_per_node;
  corpus.p = opt.p;
  corpus.q = opt.q;
  corpus.seed = opt.seed;
  const std::size_t n = g.size();
  corpus.walks.reserve(n * static_cast<std::size_t>(opt.walks_per_node));
  std::vector<double> cumulative;
  for (int rep = 0; rep < opt.walks_per_node; ++rep) {
    for (NodeId root = 0; root < n; ++root) {
      Rng rng = make_stream(opt.seed, static_cast<std::uint64_t>(root) * 1'000'003ULL +
                                          static_cast<std::uint64_t>(rep));
      std::vector<NodeId> walk{root};
      walk.reserve(static_cast<std::size_t>(opt.walk_length));
      std::optional<NodeId> prev;
      while (walk.size() < static_cast<std::size_t>(opt.walk_length)) {
        const NodeId cur = walk.back();
        if (g.degree(cur) == 0) break;
        const NodeId next = detail::sample_next(g, prev, cur, opt, rng, cumulative);
        prev = cur;
        walk.push_back(next);
      }
      corpus.walks.push_back(std::move(walk));
    }
  }
  return corpus;
}

/// One space-separated walk per line, using account ids.
inline void write_walks(std::ostream& out, const WalkCorpus& corpus, const NodeIndex& index) {
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << index.id(walk[i]);
    }
    out << '\n';
  }
}

}  // namespace botmatch

#endif  // BOTMATCH_WALKS_HPP
