#ifndef BOTMATCH_NODE2VEC_HPP
#define BOTMATCH_NODE2VEC_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <vector>

#include "botmatch/embedding.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/skipgram.hpp"
#include "botmatch/walks.hpp"

namespace botmatch {

inline EmbeddingSpace node2vec_embed(const SymGraph& g, const WalkOptions& walk_opt,
                                     const SkipGramOptions& sg_opt) {
  const auto corpus = sample_walks(g, walk_opt);
  auto model = skipgram_train(corpus.walks, g.size(), sg_opt);
  EmbeddingSpace space;
  space.name = "node2vec";
  space.ids = g.index().ids();
  space.vectors = std::move(model.input);
  space.metric = Metric::cosine;
  space.kind = SpaceKind::network;
  space.seed = sg_opt.seed;
  space.validate();
  return space;
}

struct Role2VecOptions {
  int wl_iters = 2;
  std::uint32_t bins = 1u << 14;
  WalkOptions walks;
  SkipGramOptions skipgram;
};

namespace detail {

inline std::uint64_t fnv1a_words(std::span<const std::uint64_t> words) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t w : words) {
    for (int b = 0; b < 8; ++b) {
      h ^= (w >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace detail

/// Weisfeiler-Lehman role labels in [0, bins). The initial label is
/// floor(log2(deg + 1)); each round hashes (own label, sorted neighbor labels).
inline std::vector<std::uint32_t> wl_roles(const SymGraph& g, int wl_iters, std::uint32_t bins) {
  if (wl_iters < 0) fail(ErrorKind::config, "wl_iters must be >= 0");
  if (bins == 0) fail(ErrorKind::config, "bins must be >= 1");
  const std::size_t n = g.size();
  std::vector<std::uint32_t> label(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto deg = static_cast<std::uint64_t>(g.degree(v));
    label[v] = static_cast<std::uint32_t>(std::bit_width(deg + 1) - 1) % bins;
  }
  std::vector<std::uint64_t> words;
  for (int it = 0; it < wl_iters; ++it) {
    std::vector<std::uint32_t> next(n);
    for (NodeId v = 0; v < n; ++v) {
      words.assign(1, label[v]);
      words.push_back(0xFFFFFFFFFFFFFFFFULL);  // separator
      const std::size_t own = words.size();
      for (const auto& a : g.neighbors(v)) words.push_back(label[a.node]);
      std::sort(words.begin() + static_cast<std::ptrdiff_t>(own), words.end());
      next[v] = static_cast<std::uint32_t>(detail::fnv1a_words(words) % bins);
    }
    label = std::move(next);
  }
  return label;
}

struct Role2VecResult {
  EmbeddingSpace space;
  std::vector<std::uint32_t> roles;  // role label per node
  std::size_t role_count = 0;
};

/// Walks over the graph with node ids replaced by role ids; skip-gram over
/// role tokens; each node takes its role's vector.
inline Role2VecResult role2vec_embed(const SymGraph& g, const Role2VecOptions& opt) {
  Role2VecResult r;
  r.roles = wl_roles(g, opt.wl_iters, opt.bins);
  std::map<std::uint32_t, Token> dense;
  for (auto role : r.roles) dense.emplace(role, 0);
  Token next = 0;
  for (auto& [role, tok] : dense) tok = next++;
  r.role_count = dense.size();

  auto corpus = sample_walks(g, opt.walks);
  for (auto& walk : corpus.walks) {
    for (auto& v : walk) v = dense.at(r.roles[v]);
  }
  auto model = skipgram_train(corpus.walks, dense.size(), opt.skipgram);

  r.space.name = "role2vec";
  r.space.ids = g.index().ids();
  r.space.vectors.resize(static_cast<Eigen::Index>(g.size()), opt.skipgram.dim);
  for (NodeId v = 0; v < g.size(); ++v) r.space.vectors.row(v) = model.input.row(dense.at(r.roles[v]));
  r.space.metric = Metric::cosine;
  r.space.kind = SpaceKind::network;
  r.space.seed = opt.skipgram.seed;
  r.space.validate();
  return r;
}

}  // namespace botmatch

#endif  // BOTMATCH_NODE2VEC_HPP
