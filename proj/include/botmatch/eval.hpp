#ifndef BOTMATCH_EVAL_HPP
#define BOTMATCH_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "botmatch/csv.hpp"
#include "botmatch/error.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/knn.hpp"
#include "botmatch/random.hpp"
#include "botmatch/text.hpp"
#include "json.hpp"

namespace botmatch {

/// Binary account labels. Accounts without a label count as negative.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::map<std::string, int> labels) : labels_(std::move(labels)) {
    for (const auto& [id, y] : labels_) {
      if (y != 0 && y != 1) fail(ErrorKind::input, "label for '" + id + "' must be 0 or 1");
    }
  }

  int label(const std::string& id) const {
    auto it = labels_.find(id);
    return it == labels_.end() ? 0 : it->second;
  }
  bool positive(const std::string& id) const { return label(id) == 1; }
  const std::map<std::string, int>& all() const { return labels_; }

  std::size_t positives() const {
    std::size_t p = 0;
    for (const auto& [_, y] : labels_) p += static_cast<std::size_t>(y);
    return p;
  }

  /// Drops labels for accounts outside `ids`; returns how many were dropped.
  std::size_t restrict_to(const std::vector<std::string>& ids) {
    std::unordered_set<std::string> keep(ids.begin(), ids.end());
    const std::size_t before = labels_.size();
    std::erase_if(labels_, [&](const auto& kv) { return !keep.count(kv.first); });
    return before - labels_.size();
  }

 private:
  std::map<std::string, int> labels_;
};

/// Label CSV with header "node_id,label".
inline LabelSet read_labels(std::istream& in) {
  csv::expect_header(in, {"node_id", "label"}, "label CSV");
  std::map<std::string, int> labels;
  std::size_t line = 1;
  while (auto row = csv::read_row(in)) {
    ++line;
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != 2 || ((*row)[1] != "0" && (*row)[1] != "1")) {
      fail(ErrorKind::format, "label CSV line " + std::to_string(line) + " is malformed");
    }
    labels[(*row)[0]] = (*row)[1] == "1" ? 1 : 0;
  }
  return LabelSet(std::move(labels));
}

inline void write_labels(std::ostream& out, const LabelSet& labels) {
  csv::write_row(out, {"node_id", "label"});
  for (const auto& [id, y] : labels.all()) csv::write_row(out, {id, std::to_string(y)});
}

struct EvalReport {
  std::string space;
  std::vector<std::size_t> ks;
  std::map<std::size_t, double> p_at;  // mean precision per k
  double random_baseline = 0.0;        // P / (N − 1)
  std::size_t positives = 0;
  std::size_t nodes = 0;
  std::map<std::size_t, std::vector<std::pair<std::string, double>>> per_seed;
};

inline double random_baseline(std::size_t positives, std::size_t nodes) {
  if (nodes < 2) fail(ErrorKind::evaluation, "random baseline needs at least two nodes");
  return static_cast<double>(positives) / static_cast<double>(nodes - 1);
}

/// Mean precision@k over independent single-seed queries, one per positive
/// account: precision = (positive hits) / k.
inline EvalReport precision_at_k(const SearchIndex& index, const LabelSet& labels,
                                 const std::vector<std::size_t>& ks) {
  EvalReport report;
  report.space = index.name();
  report.ks = ks;
  report.nodes = index.size();
  std::vector<std::string> seeds;
  for (const auto& id : index.ids()) {
    if (labels.positive(id)) seeds.push_back(id);
  }
  report.positives = seeds.size();
  if (seeds.empty()) fail(ErrorKind::evaluation, "no positive labels among the indexed accounts");
  report.random_baseline = random_baseline(report.positives, report.nodes);
  if (ks.empty()) fail(ErrorKind::evaluation, "no k values requested");
  const std::size_t k_max = *std::max_element(ks.begin(), ks.end());
  for (std::size_t k : ks) {
    if (k < 1) fail(ErrorKind::evaluation, "k must be >= 1");
  }

  for (const auto& seed : seeds) {
    const auto result = index.query({seed}, k_max);
    for (std::size_t k : ks) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < std::min(k, result.hits.size()); ++r) {
        hits += labels.positive(result.hits[r].id) ? 1 : 0;
      }
      report.per_seed[k].emplace_back(seed, static_cast<double>(hits) / static_cast<double>(k));
    }
  }
  for (std::size_t k : ks) {
    double sum = 0.0;
    for (const auto& [_, p] : report.per_seed[k]) sum += p;
    report.p_at[k] = sum / static_cast<double>(seeds.size());
  }
  return report;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json p_at = nlohmann::json::object();
  for (const auto& [k, v] : r.p_at) p_at["p@" + std::to_string(k)] = v;
  return {{"space", r.space},
          {"ks", r.ks},
          {"precision", p_at},
          {"random_baseline", r.random_baseline},
          {"positives", r.positives},
          {"nodes", r.nodes}};
}

/// Aligned text table: one row per space, one column per p@k, and a final
/// "Random Baseline" row.
inline void write_table(std::ostream& out, const std::vector<EvalReport>& reports) {
  if (reports.empty()) return;
  std::size_t name_w = std::string("Random Baseline").size();
  for (const auto& r : reports) name_w = std::max(name_w, r.space.size());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_w), "Model");
  out << buf;
  for (std::size_t k : reports.front().ks) {
    std::snprintf(buf, sizeof buf, "  %8s", ("p@" + std::to_string(k)).c_str());
    out << buf;
  }
  out << '\n' << std::string(name_w + 10 * reports.front().ks.size(), '-') << '\n';
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_w), r.space.c_str());
    out << buf;
    for (std::size_t k : r.ks) {
      std::snprintf(buf, sizeof buf, "  %8.3f", r.p_at.at(k));
      out << buf;
    }
    out << '\n';
  }
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_w), "Random Baseline");
  out << buf;
  for (std::size_t i = 0; i < reports.front().ks.size(); ++i) {
    std::snprintf(buf, sizeof buf, "  %8.3f", reports.front().random_baseline);
    out << buf;
  }
  out << '\n';
}

/// Area under the ROC curve of `scores` for binary `labels` (ties count 1/2).
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        rank_sum += avg_rank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) fail(ErrorKind::evaluation, "AUC needs both classes");
  return (rank_sum - static_cast<double>(pos) * (pos + 1) / 2.0) /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

// ---- synthetic data -------------------------------------------------------

/// Zero-padded ids so that lexicographic order equals numeric order.
inline std::string synthetic_id(std::size_t i, std::size_t n) {
  const int width = std::max(4, static_cast<int>(std::to_string(n > 0 ? n - 1 : 0).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%0*zu", width, i);
  return buf;
}

struct PlantedGraph {
  CommGraph graph;
  LabelSet labels;
  std::vector<int> block;  // block per node index
};

/// Directed stochastic block model. Each ordered pair (u, v), u != v, gets a
/// mention edge with probability intra_p inside a block and inter_p across.
/// Block 0 is labeled positive.
inline PlantedGraph gen_planted_graph(const std::vector<std::size_t>& blocks, double intra_p,
                                      double inter_p, std::uint64_t seed) {
  if (!(intra_p > inter_p)) fail(ErrorKind::config, "planted graph needs intra_p > inter_p");
  if (intra_p > 1.0 || inter_p < 0.0) fail(ErrorKind::config, "edge probabilities must be in [0, 1]");
  std::size_t n = 0;
  for (auto b : blocks) n += b;
  PlantedGraph pg;
  std::vector<std::string> ids(n);
  std::map<std::string, int> labels;
  for (std::size_t b = 0, v = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b]; ++i, ++v) {
      ids[v] = synthetic_id(v, n);
      pg.block.push_back(static_cast<int>(b));
      labels[ids[v]] = b == 0 ? 1 : 0;
    }
  }
  Rng rng(splitmix64(seed));
  std::vector<IndexedEdge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      const double p = pg.block[u] == pg.block[v] ? intra_p : inter_p;
      if (uniform01(rng) < p) edges.push_back({u, v, EdgeType::mention, 1});
    }
  }
  pg.graph = CommGraph::from_indexed(std::move(ids), std::move(edges));
  pg.labels = LabelSet(std::move(labels));
  return pg;
}

struct TopicCorpusOptions {
  std::size_t vocab_per_class = 50;
  std::size_t doc_len = 200;
  double noise_frac = 0.3;
  std::uint64_t seed = 0;
};

/// Per-node documents. A class-c token is drawn from the private vocabulary
/// "c<c>_w<j>" with probability 1 − noise_frac, else from the shared
/// vocabulary "shared_w<j>"; both uniformly.
inline std::vector<Document> gen_topic_corpus(const std::vector<int>& node_class,
                                              const TopicCorpusOptions& opt) {
  if (!(opt.noise_frac >= 0.0 && opt.noise_frac < 1.0)) {
    fail(ErrorKind::config, "noise_frac must be in [0, 1)");
  }
  if (opt.vocab_per_class == 0) fail(ErrorKind::config, "vocab_per_class must be >= 1");
  std::vector<Document> docs(node_class.size());
  for (std::size_t v = 0; v < node_class.size(); ++v) {
    Rng rng = make_stream(opt.seed, v);
    auto& doc = docs[v];
    doc.reserve(opt.doc_len);
    for (std::size_t t = 0; t < opt.doc_len; ++t) {
      const auto j = uniform_index(rng, opt.vocab_per_class);
      if (uniform01(rng) < opt.noise_frac) {
        doc.push_back("shared_w" + std::to_string(j));
      } else {
        doc.push_back("c" + std::to_string(node_class[v]) + "_w" + std::to_string(j));
      }
    }
  }
  return docs;
}

}  // namespace botmatch

#endif  // BOTMATCH_EVAL_HPP
