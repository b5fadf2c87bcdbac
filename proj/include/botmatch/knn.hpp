#ifndef BOTMATCH_KNN_HPP
#define BOTMATCH_KNN_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "botmatch/content.hpp"
#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/sybilrank.hpp"
#include "botmatch/text.hpp"
#include "json.hpp"

namespace botmatch {

enum class Aggregation { mean, min_dist };
enum class ScoreKind { distance, similarity, trust };

constexpr std::string_view to_string(ScoreKind k) {
  switch (k) {
    case ScoreKind::distance: return "distance";
    case ScoreKind::similarity: return "similarity";
    case ScoreKind::trust: return "trust";
  }
  return "distance";
}

inline std::optional<Aggregation> parse_aggregation(std::string_view s) {
  if (s == "mean") return Aggregation::mean;
  if (s == "min_dist") return Aggregation::min_dist;
  return std::nullopt;
}

struct Hit {
  std::string id;
  double score = 0.0;
  std::size_t rank = 0;
  bool operator==(const Hit&) const = default;
};

struct QueryResult {
  std::vector<std::string> seeds;
  std::string space;
  std::size_t k = 0;
  std::vector<Hit> hits;
  ScoreKind score_kind = ScoreKind::distance;
};

inline nlohmann::json to_json(const QueryResult& r) {
  nlohmann::json hits = nlohmann::json::array();
  for (const auto& h : r.hits) hits.push_back({{"id", h.id}, {"score", h.score}, {"rank", h.rank}});
  return {{"seeds", r.seeds}, {"space", r.space}, {"k", r.k}, {"hits", std::move(hits)},
          {"score_kind", std::string(to_string(r.score_kind))}};
}

/// Direct pairwise similarity over document rows (no embedding).
struct SimilaritySpace {
  enum class Measure { jaccard, cosine };
  std::string name;
  std::vector<std::string> ids;
  DocTermMatrix matrix;  // binary rows for jaccard, tfidf rows for cosine
  Measure measure = Measure::cosine;

  double similarity(std::size_t i, std::size_t j) const {
    return measure == Measure::jaccard ? jaccard_similarity(matrix.row(i), matrix.row(j))
                                       : cosine_similarity(matrix, i, j);
  }
};

/// SybilRank computed per query from the query's seeds.
struct GraphRankSpace {
  std::string name = "sybilrank";
  SymGraph graph;
  std::optional<int> iters;
};

/// Exact brute-force retrieval over one space. Immutable after construction;
/// `query` has no shared mutable state and may run concurrently.
class SearchIndex {
 public:
  explicit SearchIndex(EmbeddingSpace space) : name_(space.name), ids_(space.ids) {
    space.validate();
    if (space.kind != SpaceKind::ranked) {
      norms_.resize(space.size());
      for (std::size_t i = 0; i < space.size(); ++i) {
        norms_[i] = space.vectors.row(static_cast<Eigen::Index>(i)).norm();
      }
    }
    data_ = std::move(space);
    build_lookup();
  }

  explicit SearchIndex(SimilaritySpace space) : name_(space.name), ids_(space.ids) {
    if (space.ids.size() != space.matrix.rows()) {
      fail(ErrorKind::alignment, "similarity space ids do not match matrix rows");
    }
    data_ = std::move(space);
    build_lookup();
  }

  explicit SearchIndex(GraphRankSpace space) : name_(space.name), ids_(space.graph.index().ids()) {
    data_ = std::move(space);
    build_lookup();
  }

  const std::string& name() const { return name_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  bool contains(const std::string& id) const { return lookup_.count(id) > 0; }

  ScoreKind score_kind() const {
    if (std::holds_alternative<EmbeddingSpace>(data_)) {
      return std::get<EmbeddingSpace>(data_).kind == SpaceKind::ranked ? ScoreKind::trust
                                                                       : ScoreKind::distance;
    }
    if (std::holds_alternative<SimilaritySpace>(data_)) return ScoreKind::similarity;
    return ScoreKind::trust;
  }

  const EmbeddingSpace* embedding() const { return std::get_if<EmbeddingSpace>(&data_); }

  /// Top-k accounts for a seed set. Seeds and `exclude` never appear in the
  /// hits. Mean aggregation ranks by distance to the seed centroid; min_dist
  /// by the smallest distance to any seed. Similarity spaces use the maximum
  /// similarity over seeds, ranked spaces the stored (or per-query) score.
  /// Ties go to the smaller account id.
  QueryResult query(const std::vector<std::string>& seeds, std::size_t k,
                    Aggregation agg = Aggregation::mean,
                    const std::unordered_set<std::string>& exclude = {}) const {
    if (k < 1) fail(ErrorKind::query, "k must be >= 1");
    if (seeds.empty()) fail(ErrorKind::query, "query needs at least one seed");
    std::vector<std::size_t> seed_rows;
    std::set<std::string> seen;
    for (const auto& s : seeds) {
      auto it = lookup_.find(s);
      if (it == lookup_.end()) fail(ErrorKind::query, "unknown seed account '" + s + "'");
      if (seen.insert(s).second) seed_rows.push_back(it->second);
    }
    std::sort(seed_rows.begin(), seed_rows.end());

    QueryResult result;
    result.seeds.assign(seen.begin(), seen.end());
    result.space = name_;
    result.k = k;
    result.score_kind = score_kind();

    const std::vector<double> scores = score_all(seed_rows, agg);
    std::vector<char> banned(ids_.size(), 0);
    for (auto r : seed_rows) banned[r] = 1;
    for (const auto& e : exclude) {
      if (auto it = lookup_.find(e); it != lookup_.end()) banned[it->second] = 1;
    }
    std::vector<std::size_t> cand;
    cand.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!banned[i]) cand.push_back(i);
    }
    const bool ascending = result.score_kind == ScoreKind::distance;
    auto better = [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return ascending ? scores[a] < scores[b] : scores[a] > scores[b];
      return ids_[a] < ids_[b];
    };
    const std::size_t take = std::min(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(), better);
    for (std::size_t r = 0; r < take; ++r) {
      result.hits.push_back({ids_[cand[r]], scores[cand[r]], r + 1});
    }
    return result;
  }

 private:
  void build_lookup() {
    lookup_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!lookup_.emplace(ids_[i], i).second) {
        fail(ErrorKind::construction, "duplicate account id '" + ids_[i] + "' in space " + name_);
      }
    }
  }

  double distance(const EmbeddingSpace& s, std::size_t i, const Eigen::RowVectorXd& q,
                  double q_norm) const {
    const auto row = s.vectors.row(static_cast<Eigen::Index>(i));
    if (s.metric == Metric::euclidean) return (row - q).norm();
    const double denom = norms_[i] * q_norm;
    return 1.0 - (denom == 0.0 ? 0.0 : row.dot(q) / denom);
  }

  std::vector<double> score_all(const std::vector<std::size_t>& seed_rows, Aggregation agg) const {
    const std::size_t n = ids_.size();
    std::vector<double> scores(n);
    if (const auto* s = std::get_if<EmbeddingSpace>(&data_)) {
      if (s->kind == SpaceKind::ranked) {
        for (std::size_t i = 0; i < n; ++i) scores[i] = s->vectors(static_cast<Eigen::Index>(i), 0);
        return scores;
      }
      if (agg == Aggregation::mean) {
        Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(s->vectors.cols());
        for (auto r : seed_rows) centroid += s->vectors.row(static_cast<Eigen::Index>(r));
        centroid /= static_cast<double>(seed_rows.size());
        const double cn = centroid.norm();
        for (std::size_t i = 0; i < n; ++i) scores[i] = distance(*s, i, centroid, cn);
      } else {
        std::fill(scores.begin(), scores.end(), std::numeric_limits<double>::infinity());
        for (auto r : seed_rows) {
          const Eigen::RowVectorXd q = s->vectors.row(static_cast<Eigen::Index>(r));
          const double qn = norms_[r];
          for (std::size_t i = 0; i < n; ++i) scores[i] = std::min(scores[i], distance(*s, i, q, qn));
        }
      }
      return scores;
    }
    if (const auto* s = std::get_if<SimilaritySpace>(&data_)) {
      std::fill(scores.begin(), scores.end(), -std::numeric_limits<double>::infinity());
      for (auto r : seed_rows) {
        for (std::size_t i = 0; i < n; ++i) scores[i] = std::max(scores[i], s->similarity(i, r));
      }
      return scores;
    }
    const auto& g = std::get<GraphRankSpace>(data_);
    std::vector<NodeId> seeds;
    for (auto r : seed_rows) seeds.push_back(static_cast<NodeId>(r));
    auto ranked = sybil_rank(g.graph, std::span<const NodeId>(seeds), g.iters);
    return ranked.score;
  }

  std::string name_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::vector<double> norms_;
  std::variant<EmbeddingSpace, SimilaritySpace, GraphRankSpace> data_;
};

enum class ExpandMode { per_account, joint };

struct Expansion {
  std::string id;
  int hop = 0;
  std::string parent;  // seed whose query surfaced this account
  double score = 0.0;
  bool accepted = true;
};

struct ExpandResult {
  std::vector<Expansion> found;  // in discovery order
  int hops_run = 0;

  std::vector<std::string> accepted_ids() const {
    std::vector<std::string> out;
    for (const auto& f : found) {
      if (f.accepted) out.push_back(f.id);
    }
    return out;
  }
};

using AcceptFn = std::function<bool(const std::string&)>;

/// Breadth-first recursive search. Hop 1 is `query(seeds, k)`. Each later hop
/// queries with the accounts accepted in the previous hop: one single-seed
/// query per account (per_account) or one multi-seed query (joint). Accounts
/// already seen are excluded from later queries, so every query returns up to
/// k new accounts. Stops early when a hop accepts nothing.
inline ExpandResult recursive_expand(const SearchIndex& index, const std::vector<std::string>& seeds,
                                     std::size_t k, int hops, const AcceptFn& accept = {},
                                     Aggregation agg = Aggregation::mean,
                                     ExpandMode mode = ExpandMode::per_account) {
  if (hops < 1) fail(ErrorKind::query, "hops must be >= 1");
  ExpandResult result;
  std::unordered_set<std::string> known(seeds.begin(), seeds.end());

  auto record = [&](const QueryResult& q, int hop, const std::string& parent,
                    std::vector<std::string>& frontier) {
    for (const auto& h : q.hits) {
      if (!known.insert(h.id).second) continue;
      const bool ok = !accept || accept(h.id);
      result.found.push_back({h.id, hop, parent, h.score, ok});
      if (ok) frontier.push_back(h.id);
    }
  };

  std::vector<std::string> frontier;
  {
    auto q = index.query(seeds, k, agg);
    std::string parent;
    for (std::size_t i = 0; i < q.seeds.size(); ++i) parent += (i ? "," : "") + q.seeds[i];
    record(q, 1, parent, frontier);
    result.hops_run = 1;
  }
  for (int hop = 2; hop <= hops && !frontier.empty(); ++hop) {
    std::vector<std::string> next;
    if (mode == ExpandMode::joint) {
      auto q = index.query(frontier, k, agg, known);
      std::string parent;
      for (std::size_t i = 0; i < q.seeds.size(); ++i) parent += (i ? "," : "") + q.seeds[i];
      record(q, hop, parent, next);
    } else {
      for (const auto& a : frontier) {
        auto q = index.query({a}, k, agg, known);
        record(q, hop, a, next);
      }
    }
    result.hops_run = hop;
    frontier = std::move(next);
  }
  return result;
}

}  // namespace botmatch

#endif  // BOTMATCH_KNN_HPP
