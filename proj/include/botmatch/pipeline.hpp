#ifndef BOTMATCH_PIPELINE_HPP
#define BOTMATCH_PIPELINE_HPP

#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "botmatch/content.hpp"
#include "botmatch/dataset.hpp"
#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/factorize.hpp"
#include "botmatch/fusion.hpp"
#include "botmatch/katz.hpp"
#include "botmatch/knn.hpp"
#include "botmatch/node2vec.hpp"
#include "botmatch/sybilrank.hpp"
#include "botmatch/text.hpp"
#include "json.hpp"

namespace botmatch {

/// key=value hyperparameters. Every key must be read by the model that
/// receives it; leftovers are reported by `check_consumed`.
class Params {
 public:
  Params() = default;
  explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  /// Parses "key=value" lines. Blank lines and lines starting with '#' are
  /// skipped; values may be wrapped in double quotes.
  static Params parse_lines(std::string_view text) {
    Params p;
    std::size_t line_no = 0;
    while (!text.empty()) {
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      ++line_no;
      line = trim(line);
      if (line.empty() || line.front() == '#' || line.front() == '[') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        fail(ErrorKind::config, "config line " + std::to_string(line_no) + " has no '='");
      }
      auto key = trim(line.substr(0, eq));
      auto value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
      }
      if (key.empty()) fail(ErrorKind::config, "config line " + std::to_string(line_no) + " has an empty key");
      p.set(std::string(key), std::string(value));
    }
    return p;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Overlays `other` on top of this set.
  void merge(const Params& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  std::optional<std::string> get(const std::string& key) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

  std::string required(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) fail(ErrorKind::config, "missing required parameter '" + key + "'");
    return *v;
  }

  template <typename T>
  T num(const std::string& key, T fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    T out{};
    const char* end = v->data() + v->size();
    auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc{} || ptr != end) {
      fail(ErrorKind::config, "parameter '" + key + "' has bad value '" + *v + "'");
    }
    return out;
  }

  bool flag(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(ErrorKind::config, "parameter '" + key + "' must be true or false");
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    auto v = get(key);
    if (!v) return out;
    std::string cur;
    for (char c : *v) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  void check_consumed(const std::string& context) const {
    for (const auto& [k, _] : values_) {
      if (!used_.count(k)) fail(ErrorKind::config, "unknown parameter '" + k + "' for " + context);
    }
  }

  /// Keys not read so far, as a fresh set.
  Params remainder() const {
    Params out;
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) out.set(k, v);
    }
    return out;
  }

  nlohmann::json to_json() const { return nlohmann::json(values_); }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"jaccard", "cosine",   "lda",       "lsa",
                                                 "node2vec", "hope",    "gf",        "role2vec",
                                                 "sybilrank", "warmstart", "concat"};
  return names;
}

/// A built space plus what is needed to store and reload it.
struct BuiltSpace {
  nlohmann::json meta;
  std::optional<EmbeddingSpace> vectors;  // absent for similarity and graph_rank spaces
};

using ProgressFn = std::function<void(const std::string&)>;
/// Resolves an already stored space of the same dataset by name.
using SpaceLookup = std::function<EmbeddingSpace(const std::string&)>;

namespace detail {

inline VocabOptions vocab_options(const Params& p) {
  VocabOptions v;
  v.min_df = p.num<std::size_t>("min_df", v.min_df);
  v.max_df_frac = p.num<double>("max_df", v.max_df_frac);
  v.max_terms = p.num<std::size_t>("max_terms", v.max_terms);
  return v;
}

inline WalkOptions walk_options(const Params& p, std::uint64_t seed) {
  WalkOptions w;
  w.walks_per_node = p.num<int>("walks", w.walks_per_node);
  w.walk_length = p.num<int>("length", w.walk_length);
  w.p = p.num<double>("p", w.p);
  w.q = p.num<double>("q", w.q);
  w.weighted = p.flag("weighted", w.weighted);
  w.seed = seed;
  return w;
}

inline SkipGramOptions skipgram_options(const Params& p, std::uint64_t seed) {
  SkipGramOptions s;
  s.dim = p.num<int>("dim", s.dim);
  s.window = p.num<int>("window", s.window);
  s.negatives = p.num<int>("negatives", s.negatives);
  s.epochs = p.num<int>("epochs", s.epochs);
  s.lr = p.num<double>("lr", s.lr);
  // Walks and training draw from separate streams of the same seed.
  s.seed = splitmix64(seed ^ 0x5eedULL);
  return s;
}

inline FactorizeOptions factorize_options(const Params& p, std::uint64_t seed) {
  FactorizeOptions f;
  f.dim = p.num<int>("dim", f.dim);
  f.lambda = p.num<double>("lambda", f.lambda);
  f.lr = p.num<double>("lr", f.lr);
  f.epochs = p.num<int>("epochs", f.epochs);
  f.init_scale = p.num<double>("init_scale", f.init_scale);
  f.use_weights = p.flag("weighted", f.use_weights);
  f.seed = seed;
  return f;
}

inline Vocabulary dataset_vocab(const std::vector<Document>& docs, const Params& p) {
  return build_vocab(std::span<const Document>(docs), vocab_options(p));
}

}  // namespace detail

/// Rebuilds the document-term matrix of a similarity space from the dataset
/// texts and the parameters recorded at build time.
inline SimilaritySpace similarity_space(const StoredDataset& ds, const std::string& name,
                                        const std::string& model, const Params& p) {
  const auto docs = ds.documents();
  const auto vocab = detail::dataset_vocab(docs, p);
  SimilaritySpace s;
  s.name = name;
  s.ids = ds.ids();
  if (model == "jaccard") {
    s.measure = SimilaritySpace::Measure::jaccard;
    s.matrix = count_matrix(docs, vocab, TermWeighting::binary);
  } else {
    s.measure = SimilaritySpace::Measure::cosine;
    s.matrix = count_matrix(docs, vocab, TermWeighting::tfidf);
  }
  return s;
}

/// Builds one space. `params` must hold only keys the model understands plus
/// `seed` and `metric`.
inline BuiltSpace build_space(const std::string& model, const std::string& name,
                              const StoredDataset& ds, const Params& params,
                              const SpaceLookup& lookup = {}, const ProgressFn& progress = {}) {
  const auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  const auto seed = params.num<std::uint64_t>("seed", 0);
  const auto metric_name = params.get("metric");
  // Unknown keys are reported before any expensive work.
  const auto ready = [&] { params.check_consumed("model '" + model + "'"); };
  BuiltSpace out;
  Realization realization = Realization::embedding;
  EmbeddingSpace space;

  if (model == "jaccard" || model == "cosine") {
    detail::vocab_options(params);
    ready();
    // Built once here so bad vocabulary settings fail at build time.
    auto s = similarity_space(ds, name, model, params);
    say("vocabulary: " + std::to_string(s.matrix.cols()) + " terms");
    realization = Realization::similarity;
  } else if (model == "lda") {
    const auto docs = ds.documents();
    const auto vocab = detail::dataset_vocab(docs, params);
    LdaOptions opt;
    opt.topics = params.num<int>("topics", opt.topics);
    opt.alpha = params.num<double>("alpha", opt.alpha);
    opt.beta = params.num<double>("beta", opt.beta);
    opt.iters = params.num<int>("iters", opt.iters);
    opt.seed = seed;
    const bool hellinger = params.flag("hellinger", false);
    ready();
    const auto ids = ds.ids();
    const int every = std::max(1, opt.iters / 10);
    auto fit = lda_fit(count_matrix(docs, vocab, TermWeighting::tf), ids, opt,
                       [&](int sweep, const LdaModel&) {
                         if ((sweep + 1) % every == 0) {
                           say("lda sweep " + std::to_string(sweep + 1) + "/" + std::to_string(opt.iters));
                         }
                       });
    space = hellinger ? hellinger_space(fit.theta) : std::move(fit.theta);
  } else if (model == "lsa") {
    const int dim = params.num<int>("dim", 100);
    const auto docs = ds.documents();
    const auto vocab = detail::dataset_vocab(docs, params);
    ready();
    SvdOptions svd;
    svd.seed = seed;
    const auto ids = ds.ids();
    space = lsa_fit(count_matrix(docs, vocab, TermWeighting::tfidf), ids, dim, svd);
  } else if (model == "node2vec") {
    const auto walk = detail::walk_options(params, seed);
    const auto sg = detail::skipgram_options(params, seed);
    ready();
    say("sampling walks and training skip-gram");
    space = node2vec_embed(symmetrize(ds.graph), walk, sg);
  } else if (model == "hope") {
    const int dim = params.num<int>("dim", 64);
    auto alpha = params.get("alpha");
    double a = 0.0;
    if (alpha) a = params.num<double>("alpha", 0.0);
    ready();
    if (!alpha) {
      a = default_katz_alpha(spectral_radius(dense_adjacency(ds.graph)));
    }
    SvdOptions svd;
    svd.seed = seed;
    auto r = hope_embed(ds.graph, dim, a, svd);
    say("katz residual " + format_g9(r.katz_residual));
    space = std::move(r.space);
  } else if (model == "gf") {
    const auto opt = detail::factorize_options(params, seed);
    ready();
    auto r = graph_factorize(ds.graph, opt);
    if (!r.epoch_objective.empty()) say("final objective " + format_g9(r.epoch_objective.back()));
    space = std::move(r.space);
  } else if (model == "role2vec") {
    Role2VecOptions opt;
    opt.wl_iters = params.num<int>("wl_iters", opt.wl_iters);
    opt.bins = params.num<std::uint32_t>("bins", opt.bins);
    opt.walks = detail::walk_options(params, seed);
    opt.skipgram = detail::skipgram_options(params, seed);
    ready();
    auto r = role2vec_embed(symmetrize(ds.graph), opt);
    say(std::to_string(r.role_count) + " structural roles");
    space = std::move(r.space);
  } else if (model == "sybilrank") {
    const auto seeds = params.list("seeds");
    std::optional<int> iters;
    if (params.has("iters")) iters = params.num<int>("iters", 0);
    const bool weighted = params.flag("weighted", false);
    ready();
    if (seeds.empty()) {
      if (weighted) fail(ErrorKind::config, "weighted sybilrank needs fixed seeds");
      realization = Realization::graph_rank;
    } else {
      auto r = sybil_rank(symmetrize(ds.graph), std::span<const std::string>(seeds), iters, weighted);
      say("sybilrank ran " + std::to_string(r.state.iterations) + " iterations");
      space = std::move(r.space);
    }
  } else if (model == "warmstart") {
    const auto content_name = params.required("content");
    const auto opt = detail::factorize_options(params, seed);
    ready();
    if (!lookup) fail(ErrorKind::config, "warmstart needs access to stored spaces");
    const auto content = lookup(content_name);
    auto r = warm_start_factorize(ds.graph, content, opt);
    if (!r.epoch_objective.empty()) say("final objective " + format_g9(r.epoch_objective.back()));
    space = std::move(r.space);
  } else if (model == "concat") {
    const auto a_name = params.required("a");
    const auto b_name = params.required("b");
    const double mix = params.num<double>("mix", 0.5);
    ready();
    if (!lookup) fail(ErrorKind::config, "concat needs access to stored spaces");
    space = concat_spaces(lookup(a_name), lookup(b_name), mix);
  } else {
    fail(ErrorKind::config, "unknown model '" + model + "'");
  }

  if (metric_name && realization != Realization::embedding) {
    fail(ErrorKind::config, "metric does not apply to model '" + model + "'");
  }
  ready();

  out.meta = {{"name", name},
              {"model", model},
              {"seed", seed},
              {"params", params.to_json()},
              {"realization", std::string(to_string(realization))}};
  if (realization == Realization::embedding) {
    if (metric_name) {
      auto m = parse_metric(*metric_name);
      if (!m) fail(ErrorKind::config, "unknown metric '" + *metric_name + "'");
      if (space.kind == SpaceKind::ranked) fail(ErrorKind::config, "ranked spaces have no metric");
      space.metric = *m;
    }
    space.name = name;
    space.seed = seed;
    out.meta["kind"] = std::string(to_string(space.kind));
    out.meta["metric"] = space.kind == SpaceKind::ranked ? "ranked" : std::string(to_string(space.metric));
    out.meta["n"] = space.size();
    out.meta["dim"] = space.dim();
    out.vectors = std::move(space);
  } else {
    out.meta["kind"] = realization == Realization::similarity ? "content" : "ranked";
    out.meta["metric"] = realization == Realization::similarity ? (model == "jaccard" ? "jaccard" : "cosine")
                                                                 : "ranked";
    out.meta["n"] = ds.accounts.size();
  }
  return out;
}

/// Stores a built space under the dataset directory.
inline void store_space(const StoredDataset& ds, const BuiltSpace& built) {
  save_space(ds.dir, built.meta.at("name").get<std::string>(), built.meta,
             built.vectors ? &*built.vectors : nullptr);
}

/// Lookup that reads embedding spaces from the dataset directory.
inline SpaceLookup stored_lookup(const StoredDataset& ds) {
  return [&ds](const std::string& name) {
    const auto meta = read_space_meta(ds.dir, name);
    if (meta.value("realization", std::string("embedding")) != "embedding") {
      fail(ErrorKind::config, "space '" + name + "' has no stored vectors");
    }
    return load_embedding(ds.dir, name);
  };
}

/// Search index for a stored space.
inline SearchIndex load_index(const StoredDataset& ds, const std::string& name) {
  const auto meta = read_space_meta(ds.dir, name);
  const auto realization = meta.value("realization", std::string("embedding"));
  if (realization == "embedding") return SearchIndex(load_embedding(ds.dir, name));
  std::map<std::string, std::string> values;
  const auto stored = meta.value("params", nlohmann::json::object());
  for (const auto& [k, v] : stored.items()) values[k] = v.get<std::string>();
  Params p(values);
  if (realization == "similarity") {
    return SearchIndex(similarity_space(ds, name, meta.at("model").get<std::string>(), p));
  }
  if (realization == "graph_rank") {
    GraphRankSpace g;
    g.name = name;
    g.graph = symmetrize(ds.graph);
    if (p.has("iters")) g.iters = p.num<int>("iters", 0);
    return SearchIndex(std::move(g));
  }
  fail(ErrorKind::format, "space '" + name + "' has unknown realization '" + realization + "'");
}

}  // namespace botmatch

#endif  // BOTMATCH_PIPELINE_HPP
