#ifndef BOTMATCH_DATASET_HPP
#define BOTMATCH_DATASET_HPP

// On-disk dataset directory:
//   dataset.json     name and pruning counts
//   accounts.csv     account_id,screen_name,n_posts,retweet_fraction
//   texts.csv        node_id,text   (cleaned tokens joined by single spaces)
//   edges.csv        source,target,type,weight
//   graph.bmg        binary snapshot of the same graph
//   labels.csv       node_id,label  (optional)
//   spaces/<name>.bme and spaces/<name>.meta.json

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "botmatch/csv.hpp"
#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/eval.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/ingest.hpp"
#include "botmatch/io.hpp"
#include "botmatch/text.hpp"
#include "json.hpp"

namespace botmatch {

namespace fs = std::filesystem;

inline std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

inline std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// ---- CSV tables ------------------------------------------------------------

inline void write_edges_csv(std::ostream& out, const std::vector<EdgeRecord>& edges) {
  csv::write_row(out, {"source", "target", "type", "weight"});
  for (const auto& e : edges) {
    csv::write_row(out, {e.source, e.target, std::string(to_string(e.edge_type)), std::to_string(e.weight)});
  }
}

inline std::vector<EdgeRecord> read_edges_csv(std::istream& in) {
  csv::expect_header(in, {"source", "target", "type", "weight"}, "edge CSV");
  std::vector<EdgeRecord> edges;
  std::size_t line = 1;
  while (auto row = csv::read_row(in)) {
    ++line;
    if (row->size() == 1 && row->front().empty()) continue;
    auto bad = [&](const std::string& why) {
      fail(ErrorKind::format, "edge CSV line " + std::to_string(line) + ": " + why);
    };
    if (row->size() != 4) bad("expected 4 fields");
    auto type = parse_edge_type((*row)[2]);
    if (!type) bad("unknown edge type '" + (*row)[2] + "'");
    std::uint64_t weight = 0;
    try {
      std::size_t used = 0;
      weight = std::stoull((*row)[3], &used);
      if (used != (*row)[3].size()) bad("bad weight");
    } catch (const std::exception&) {
      bad("bad weight '" + (*row)[3] + "'");
    }
    if (weight == 0) bad("weight must be >= 1");
    if ((*row)[0].empty() || (*row)[1].empty()) bad("empty endpoint");
    edges.push_back({(*row)[0], (*row)[1], *type, weight});
  }
  // Merge repeated (source, target, type) rows.
  std::sort(edges.begin(), edges.end());
  std::vector<EdgeRecord> merged;
  for (auto& e : edges) {
    if (!merged.empty() && merged.back().key() == e.key()) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(std::move(e));
    }
  }
  return merged;
}

/// "node_id,text" rows in input order. A node may appear on several rows
/// (one per post).
inline std::vector<std::pair<std::string, std::string>> read_texts_csv(std::istream& in) {
  csv::expect_header(in, {"node_id", "text"}, "text CSV");
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t line = 1;
  while (auto row = csv::read_row(in)) {
    ++line;
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != 2 || (*row)[0].empty()) {
      fail(ErrorKind::format, "text CSV line " + std::to_string(line) + " is malformed");
    }
    rows.emplace_back((*row)[0], (*row)[1]);
  }
  return rows;
}

inline void write_texts_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  csv::write_row(out, {"node_id", "text"});
  for (const auto& [id, text] : rows) csv::write_row(out, {id, text});
}

/// Builds a dataset from an edge table and a text table. Every node with at
/// least one text row counts as an author; edge types are taken as given.
inline Dataset dataset_from_tables(const std::vector<EdgeRecord>& edges,
                                   const std::vector<std::pair<std::string, std::string>>& texts,
                                   bool strip_tags = false) {
  std::map<std::string, AccountRecord> by_id;
  for (const auto& [id, text] : texts) {
    auto& acc = by_id[id];
    acc.account_id = id;
    if (!acc.raw_text.empty()) acc.raw_text.push_back('\n');
    acc.raw_text += text;
    auto toks = clean_text(text, strip_tags);
    acc.clean_text.insert(acc.clean_text.end(), toks.begin(), toks.end());
    ++acc.n_posts;
  }
  std::vector<AccountRecord> accounts;
  for (auto& [_, acc] : by_id) accounts.push_back(std::move(acc));
  return prune_dataset(std::move(accounts), edges);
}

/// Dataset from an in-memory graph and one pre-tokenized document per node
/// (node order). Used by the synthetic generators.
inline Dataset dataset_from_graph(const CommGraph& g, const std::vector<Document>& docs) {
  if (docs.size() != g.size()) fail(ErrorKind::alignment, "one document per node is required");
  std::vector<AccountRecord> accounts(g.size());
  for (NodeId v = 0; v < g.size(); ++v) {
    auto& a = accounts[v];
    a.account_id = g.id(v);
    a.clean_text = docs[v];
    a.raw_text = join_tokens(docs[v]);
    a.n_posts = 1;
  }
  return prune_dataset(std::move(accounts), g.edge_records());
}

// ---- dataset directory -----------------------------------------------------

/// Loaded dataset directory. Accounts are sorted by id, which is also the
/// node order of `graph`.
struct StoredDataset {
  std::string name;
  fs::path dir;
  std::vector<AccountRecord> accounts;  // raw_text is not persisted
  std::vector<EdgeRecord> edges;
  std::optional<LabelSet> labels;
  CommGraph graph;

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(accounts.size());
    for (const auto& a : accounts) out.push_back(a.account_id);
    return out;
  }

  std::vector<Document> documents() const {
    std::vector<Document> docs;
    docs.reserve(accounts.size());
    for (const auto& a : accounts) docs.push_back(a.clean_text);
    return docs;
  }

  const AccountRecord* account(const std::string& id) const {
    auto it = std::lower_bound(accounts.begin(), accounts.end(), id,
                               [](const AccountRecord& a, const std::string& k) { return a.account_id < k; });
    return it != accounts.end() && it->account_id == id ? &*it : nullptr;
  }
};

/// Writes every table of a dataset directory. Existing spaces are kept.
inline void save_dataset(const fs::path& dir, const std::string& name, const Dataset& ds,
                         const std::optional<LabelSet>& labels = std::nullopt) {
  fs::create_directories(dir / "spaces");
  std::ostringstream accounts, texts, edges, graph;
  csv::write_row(accounts, {"account_id", "screen_name", "n_posts", "retweet_fraction"});
  csv::write_row(texts, {"node_id", "text"});
  for (const auto& a : ds.accounts) {
    csv::write_row(accounts, {a.account_id, a.screen_name, std::to_string(a.n_posts), format_g9(a.retweet_fraction)});
    csv::write_row(texts, {a.account_id, join_tokens(a.clean_text)});
  }
  write_edges_csv(edges, ds.edges);
  std::vector<std::string> ids;
  for (const auto& a : ds.accounts) ids.push_back(a.account_id);
  write_snapshot(graph, CommGraph::from_edges(ids, ds.edges));
  nlohmann::json meta = {{"name", name},
                         {"accounts", ds.accounts.size()},
                         {"edges", ds.edges.size()},
                         {"pruning",
                          {{"authors", ds.stats.authors},
                           {"edges_in", ds.stats.edges_in},
                           {"dangling_edges_removed", ds.stats.dangling_edges_removed},
                           {"isolates_removed", ds.stats.isolates_removed}}}};
  io::write_file_atomic(dir / "accounts.csv", accounts.str());
  io::write_file_atomic(dir / "texts.csv", texts.str());
  io::write_file_atomic(dir / "edges.csv", edges.str());
  io::write_file_atomic(dir / "graph.bmg", graph.str());
  io::write_file_atomic(dir / "dataset.json", meta.dump(2) + "\n");
  if (labels) {
    LabelSet restricted = *labels;
    restricted.restrict_to(ids);
    std::ostringstream l;
    write_labels(l, restricted);
    io::write_file_atomic(dir / "labels.csv", l.str());
  }
}

inline StoredDataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::io, "dataset directory '" + dir.string() + "' not found");
  StoredDataset ds;
  ds.dir = dir;
  ds.name = dir.filename().string();
  if (fs::exists(dir / "dataset.json")) {
    try {
      auto meta = nlohmann::json::parse(io::read_file(dir / "dataset.json"));
      ds.name = meta.value("name", ds.name);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::format, "bad dataset.json: " + std::string(e.what()));
    }
  }
  {
    auto in = io::open_in(dir / "accounts.csv");
    csv::expect_header(in, {"account_id", "screen_name", "n_posts", "retweet_fraction"}, "accounts CSV");
    std::size_t line = 1;
    while (auto row = csv::read_row(in)) {
      ++line;
      if (row->size() == 1 && row->front().empty()) continue;
      if (row->size() != 4) fail(ErrorKind::format, "accounts CSV line " + std::to_string(line) + " is malformed");
      AccountRecord a;
      a.account_id = (*row)[0];
      a.screen_name = (*row)[1];
      try {
        a.n_posts = std::stoull((*row)[2]);
        a.retweet_fraction = std::stod((*row)[3]);
      } catch (const std::exception&) {
        fail(ErrorKind::format, "accounts CSV line " + std::to_string(line) + " has bad numbers");
      }
      ds.accounts.push_back(std::move(a));
    }
  }
  std::sort(ds.accounts.begin(), ds.accounts.end(),
            [](const auto& a, const auto& b) { return a.account_id < b.account_id; });
  {
    auto in = io::open_in(dir / "texts.csv");
    for (const auto& [id, text] : read_texts_csv(in)) {
      auto* acc = const_cast<AccountRecord*>(ds.account(id));
      if (!acc) fail(ErrorKind::format, "texts.csv names unknown account '" + id + "'");
      auto toks = split_tokens(text);
      acc->clean_text.insert(acc->clean_text.end(), toks.begin(), toks.end());
    }
  }
  {
    auto in = io::open_in(dir / "edges.csv");
    ds.edges = read_edges_csv(in);
  }
  ds.graph = CommGraph::from_edges(ds.ids(), ds.edges);
  if (fs::exists(dir / "labels.csv")) {
    auto in = io::open_in(dir / "labels.csv");
    ds.labels = read_labels(in);
  }
  return ds;
}

// ---- spaces ---------------------------------------------------------------

/// How a stored space is turned into a search index.
enum class Realization { embedding, similarity, graph_rank };

constexpr std::string_view to_string(Realization r) {
  switch (r) {
    case Realization::embedding: return "embedding";
    case Realization::similarity: return "similarity";
    case Realization::graph_rank: return "graph_rank";
  }
  return "embedding";
}

inline fs::path space_meta_path(const fs::path& dir, const std::string& name) {
  return dir / "spaces" / (name + ".meta.json");
}

inline fs::path space_vectors_path(const fs::path& dir, const std::string& name) {
  return dir / "spaces" / (name + ".bme");
}

inline bool valid_space_name(const std::string& name) {
  if (name.empty() || name.size() > 64) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }) && name.front() != '.';
}

/// Names of spaces with a metadata file, sorted.
inline std::vector<std::string> list_spaces(const fs::path& dir) {
  std::vector<std::string> names;
  const auto spaces = dir / "spaces";
  if (!fs::is_directory(spaces)) return names;
  const std::string suffix = ".meta.json";
  for (const auto& entry : fs::directory_iterator(spaces)) {
    const auto f = entry.path().filename().string();
    if (f.size() > suffix.size() && f.ends_with(suffix)) names.push_back(f.substr(0, f.size() - suffix.size()));
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline nlohmann::json read_space_meta(const fs::path& dir, const std::string& name) {
  if (!valid_space_name(name)) fail(ErrorKind::query, "invalid space name '" + name + "'");
  const auto p = space_meta_path(dir, name);
  if (!fs::exists(p)) fail(ErrorKind::query, "space '" + name + "' not found");
  try {
    return nlohmann::json::parse(io::read_file(p));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, "bad metadata for space '" + name + "': " + e.what());
  }
}

/// Embedding spaces are written as <name>.bme; every space gets a metadata
/// file.
inline void save_space(const fs::path& dir, const std::string& name, const nlohmann::json& meta,
                       const EmbeddingSpace* vectors) {
  if (!valid_space_name(name)) fail(ErrorKind::config, "invalid space name '" + name + "'");
  if (vectors) {
    std::ostringstream out;
    write_embedding(out, *vectors);
    io::write_file_atomic(space_vectors_path(dir, name), out.str());
  }
  io::write_file_atomic(space_meta_path(dir, name), meta.dump(2) + "\n");
}

inline EmbeddingSpace load_embedding(const fs::path& dir, const std::string& name) {
  const auto meta = read_space_meta(dir, name);
  const auto kind = parse_kind(meta.value("kind", std::string("content")));
  auto in = io::open_in(space_vectors_path(dir, name));
  auto space = read_embedding(in, kind.value_or(SpaceKind::content));
  space.name = name;
  space.seed = meta.value("seed", std::uint64_t{0});
  return space;
}

}  // namespace botmatch

#endif  // BOTMATCH_DATASET_HPP
