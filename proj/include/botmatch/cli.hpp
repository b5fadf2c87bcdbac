#ifndef BOTMATCH_CLI_HPP
#define BOTMATCH_CLI_HPP

// Batch entry points. Every option lands in a Params map layered over the
// --config file, so flags override config keys of the same name
// (--doc-len on the command line is doc_len in a config file).

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "botmatch/dataset.hpp"
#include "botmatch/error.hpp"
#include "botmatch/eval.hpp"
#include "botmatch/ingest.hpp"
#include "botmatch/io.hpp"
#include "botmatch/knn.hpp"
#include "botmatch/pipeline.hpp"
#include "botmatch/projection.hpp"
#include "botmatch/randstring.hpp"
#include "botmatch/service.hpp"
#include "botmatch/service_http.hpp"

namespace botmatch::cli {

enum ExitCode : int { ok = 0, usage = 1, data = 2, numeric = 3 };

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::mode:
      return usage;
    case ErrorKind::spectral:
    case ErrorKind::training:
      return numeric;
    default:
      return data;
  }
}

namespace detail {

inline std::string key_of(const std::string& flag) {
  std::string k = flag.substr(flag.rfind(',') == std::string::npos ? 0 : flag.rfind(',') + 1);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (auto& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

/// Collects the options of one subcommand.
struct Command {
  CLI::App* app = nullptr;
  Params flags;
  std::string config_path;

  void option(const std::string& flag, const std::string& help) {
    const auto key = key_of(flag);
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { flags.set(key, v); }, help);
  }

  void toggle(const std::string& flag, const std::string& help) {
    const auto key = key_of(flag);
    app->add_flag_callback(flag, [this, key] { flags.set(key, "true"); }, help);
  }

  /// The effective parameters: config file first, then flags.
  Params resolve() const {
    Params p;
    if (!config_path.empty()) p = Params::parse_lines(io::read_file(config_path));
    p.merge(flags);
    return p;
  }
};

inline std::vector<std::size_t> parse_ks(const std::vector<std::string>& items) {
  std::vector<std::size_t> ks;
  for (const auto& s : items) {
    Params one(std::map<std::string, std::string>{{"k", s}});
    const auto k = one.num<long long>("k", 0);
    if (k < 1) fail(ErrorKind::config, "k values must be positive integers");
    ks.push_back(static_cast<std::size_t>(k));
  }
  if (ks.empty()) fail(ErrorKind::config, "no k values given");
  return ks;
}

}  // namespace detail

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Seed-based retrieval of coordinated accounts over text and interaction embeddings."};
    app.name("botmatch");
    app.require_subcommand(1);
    app.fallthrough(false);

    auto add = [&](const std::string& name, const std::string& help) {
      auto cmd = std::make_unique<detail::Command>();
      cmd->app = app.add_subcommand(name, help);
      cmd->app->add_option("--config", cmd->config_path, "key=value file; flags override its entries");
      cmd->option("--seed", "random seed (default 0)");
      cmd->option("--threads", "worker threads (default 1; work is single-threaded and deterministic)");
      cmd->toggle("--deterministic", "deterministic mode (always on)");
      commands_.emplace(name, std::move(cmd));
      return commands_.at(name).get();
    };

    auto* gen = add("gen", "write a synthetic dataset (planted communities) or a name list");
    gen->option("--kind", "planted (default) or names");
    gen->option("--out", "output dataset directory (planted) or CSV file (names)");
    gen->option("--name", "dataset name");
    gen->option("--blocks", "block sizes, e.g. 100,100");
    gen->option("--intra", "edge probability inside a block (0.1)");
    gen->option("--inter", "edge probability across blocks (0.005)");
    gen->option("--noise", "shared-vocabulary token fraction (0.3)");
    gen->option("--vocab", "private vocabulary size per block (50)");
    gen->option("--doc-len", "tokens per account (200)");
    gen->option("--n", "names per class for --kind names (1000)");

    auto* ingest = add("ingest", "build a dataset directory from posts or from edge/text tables");
    ingest->option("--posts", "post file (JSON lines or CSV)");
    ingest->option("--format", "jsonl or csv (default from the extension)");
    ingest->toggle("--strip-tags", "drop #hashtag and @mention tokens");
    ingest->option("--edges", "edge CSV: source,target,type,weight");
    ingest->option("--texts", "text CSV: node_id,text");
    ingest->option("--labels", "label CSV: node_id,label");
    ingest->option("--out", "output dataset directory");
    ingest->option("--name", "dataset name");

    auto* embed = add("embed", "build a named space in a dataset");
    embed->option("--dataset", "dataset directory");
    embed->option("--model", "jaccard|cosine|lda|lsa|node2vec|hope|gf|role2vec|sybilrank|warmstart|concat");
    embed->option("--space", "space name (defaults to the model name)");
    embed->option("--metric", "cosine or euclidean");
    embed->app->add_option_function<std::vector<std::string>>(
        "-P,--param",
        [e = embed](const std::vector<std::string>& kvs) {
          for (const auto& kv : kvs) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "needs key=value, got '" + kv + "'");
            e->flags.set(kv.substr(0, eq), kv.substr(eq + 1));
          }
        },
        "model hyperparameter key=value (repeatable), e.g. -P topics=20");

    auto* query = add("query", "top-k accounts for a seed set");
    query->option("--dataset", "dataset directory");
    query->option("--space", "space name");
    query->option("--seeds", "comma-separated account ids");
    query->option("--k", "number of hits (10)");
    query->option("--aggregation", "mean or min_dist");
    query->option("--format", "csv (default) or json");
    query->option("--out", "output file (default stdout)");

    auto* expand = add("expand", "recursive search from seeds");
    expand->option("--dataset", "dataset directory");
    expand->option("--space", "space name");
    expand->option("--seeds", "comma-separated account ids");
    expand->option("--k", "hits per query (10)");
    expand->option("--hops", "search depth (2)");
    expand->option("--mode", "per_account (default) or joint");
    expand->option("--aggregation", "mean or min_dist");
    expand->option("--accept", "all (default) or labels: only labeled positives seed the next hop");
    expand->option("--out", "output file (default stdout)");

    auto* eval = add("eval", "precision@k over the labeled positives");
    eval->option("--dataset", "dataset directory");
    eval->option("--space", "comma-separated space names");
    eval->option("--labels", "label CSV (default: the dataset's labels.csv)");
    eval->option("--k", "comma-separated k values (10,50)");
    eval->option("--format", "table (default) or json");
    eval->option("--out", "output file (default stdout)");

    auto* project = add("project", "2-D projection of a space as CSV");
    project->option("--dataset", "dataset directory");
    project->option("--space", "space name");
    project->option("--method", "pca (default) or tsne");
    project->option("--perplexity", "t-SNE perplexity (30)");
    project->option("--iters", "t-SNE iterations (1000)");
    project->option("--out", "output file (default stdout)");

    auto* rs = add("randstring", "random-string screen-name detector");
    rs->app->add_option_function<std::string>(
        "action", [rs](const std::string& v) { rs->flags.set("action", v); }, "train | score | bench")
        ->required();
    rs->option("--model", "model JSON (score)");
    rs->option("--in", "names, one per line (score; default stdin)");
    rs->option("--n", "names per class for train/bench (10000)");
    rs->option("--epochs", "SGD epochs (10)");
    rs->option("--lr", "learning rate (0.1)");
    rs->option("--l2", "L2 weight (1e-5)");
    rs->option("--out", "model JSON (train) or output file");

    auto* serve = add("serve", "run the JSON service");
    serve->option("--root", "directory holding dataset directories");
    serve->option("--host", "bind address (127.0.0.1)");
    serve->option("--port", "port (8080)");
    serve->option("--sessions", "session directory (default <root>/.sessions)");
    serve->option("--static", "directory served under /ui/");
    serve->option("--randstring-model", "model JSON for account cards");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        app.exit(e, out_, err_);
        return ok;
      }
      err_ << "error: " << e.what() << "\n";
      const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
      err_ << sub->help();
      return usage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
      Params p = commands_.at(name)->resolve();
      const auto threads = p.num<int>("threads", 1);
      if (threads < 1) fail(ErrorKind::config, "--threads must be >= 1");
      p.flag("deterministic", true);
      p.get("out");  // read by emit()
      if (name == "gen") return cmd_gen(p);
      if (name == "ingest") return cmd_ingest(p);
      if (name == "embed") return cmd_embed(p);
      if (name == "query") return cmd_query(p);
      if (name == "expand") return cmd_expand(p);
      if (name == "eval") return cmd_eval(p);
      if (name == "project") return cmd_project(p);
      if (name == "randstring") return cmd_randstring(p);
      if (name == "serve") return cmd_serve(p);
      return usage;
    } catch (const Error& e) {
      err_ << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return data;
    }
  }

 private:
  void emit(const Params& p, const std::string& text) {
    const auto path = p.str("out", "");
    if (path.empty() || path == "-") {
      out_ << text;
      out_.flush();
    } else {
      io::write_file_atomic(path, text);
      err_ << "wrote " << path << "\n";
    }
  }

  static std::uint64_t seed_of(const Params& p) { return p.num<std::uint64_t>("seed", 0); }

  StoredDataset dataset(const Params& p) { return load_dataset(p.required("dataset")); }

  int cmd_gen(const Params& p) {
    const auto kind = p.str("kind", "planted");
    const auto seed = seed_of(p);
    const auto out = p.required("out");
    if (kind == "names") {
      const auto n = p.num<std::size_t>("n", 1000);
      p.check_consumed("gen");
      std::ostringstream s;
      csv::write_row(s, {"name", "label"});
      for (const auto& name : randstring::gen_random_names(n, seed)) csv::write_row(s, {name, "1"});
      for (const auto& name : randstring::gen_handle_names(n, seed + 1)) csv::write_row(s, {name, "0"});
      io::write_file_atomic(out, s.str());
      err_ << "wrote " << 2 * n << " names to " << out << "\n";
      return ok;
    }
    if (kind != "planted") fail(ErrorKind::config, "unknown --kind '" + kind + "'");
    std::vector<std::size_t> blocks;
    for (const auto& b : p.has("blocks") ? p.list("blocks") : std::vector<std::string>{"100", "100"}) {
      blocks.push_back(Params(std::map<std::string, std::string>{{"b", b}}).num<std::size_t>("b", 0));
    }
    const double intra = p.num<double>("intra", 0.1);
    const double inter = p.num<double>("inter", 0.005);
    TopicCorpusOptions topics;
    topics.noise_frac = p.num<double>("noise", 0.3);
    topics.vocab_per_class = p.num<std::size_t>("vocab", topics.vocab_per_class);
    topics.doc_len = p.num<std::size_t>("doc_len", topics.doc_len);
    topics.seed = seed;
    const auto name = p.str("name", fs::path(out).filename().string());
    p.check_consumed("gen");
    auto pg = gen_planted_graph(blocks, intra, inter, seed);
    auto docs = gen_topic_corpus(pg.block, topics);
    auto ds = dataset_from_graph(pg.graph, docs);
    save_dataset(out, name, ds, pg.labels);
    err_ << "wrote " << ds.accounts.size() << " accounts, " << ds.edges.size() << " edges to " << out << "\n";
    return ok;
  }

  int cmd_ingest(const Params& p) {
    const auto out = p.required("out");
    const auto name = p.str("name", fs::path(out).filename().string());
    const bool strip = p.flag("strip_tags", false);
    const auto labels_path = p.str("labels", "");
    Dataset ds;
    if (p.has("posts")) {
      const auto path = p.required("posts");
      auto format_name = p.str("format", fs::path(path).extension() == ".csv" ? "csv" : "jsonl");
      PostFormat format;
      if (format_name == "jsonl") {
        format = PostFormat::jsonl;
      } else if (format_name == "csv") {
        format = PostFormat::csv;
      } else {
        fail(ErrorKind::config, "--format must be jsonl or csv");
      }
      if (p.has("edges") || p.has("texts")) fail(ErrorKind::config, "use either --posts or --edges/--texts");
      p.check_consumed("ingest");
      auto in = io::open_in(path);
      auto parsed = parse_posts(in, format);
      err_ << "parsed " << parsed.posts.size() << " posts (" << parsed.skipped << " malformed skipped)\n";
      ds = assemble_dataset(parsed.posts, build_edges(parsed.posts), strip);
    } else {
      const auto edges_path = p.required("edges");
      const auto texts_path = p.required("texts");
      p.check_consumed("ingest");
      auto ein = io::open_in(edges_path);
      auto tin = io::open_in(texts_path);
      ds = dataset_from_tables(read_edges_csv(ein), read_texts_csv(tin), strip);
    }
    std::optional<LabelSet> labels;
    if (!labels_path.empty()) {
      auto lin = io::open_in(labels_path);
      labels = read_labels(lin);
    }
    save_dataset(out, name, ds, labels);
    err_ << "kept " << ds.accounts.size() << " accounts and " << ds.edges.size() << " edges ("
         << ds.stats.dangling_edges_removed << " dangling edges and " << ds.stats.isolates_removed
         << " isolates removed)\n";
    return ok;
  }

  int cmd_embed(const Params& p) {
    auto ds = dataset(p);
    const auto model = p.required("model");
    const auto name = p.str("space", model);
    Params hyper = p.remainder();
    hyper.set("seed", std::to_string(seed_of(p)));
    const auto start = std::chrono::steady_clock::now();
    auto built = build_space(model, name, ds, hyper, stored_lookup(ds),
                             [this](const std::string& msg) { err_ << msg << "\n"; });
    store_space(ds, built);
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err_ << "stored space '" << name << "' in " << format_g9(secs) << " s\n";
    out_ << built.meta.dump(2) << "\n";
    return ok;
  }

  int cmd_query(const Params& p) {
    auto ds = dataset(p);
    const auto space = p.required("space");
    const auto seeds = p.list("seeds");
    if (seeds.empty()) fail(ErrorKind::config, "--seeds is required");
    const auto k = detail::parse_ks({p.str("k", "10")}).front();
    const auto agg = parse_aggregation(p.str("aggregation", "mean"));
    if (!agg) fail(ErrorKind::config, "--aggregation must be mean or min_dist");
    const auto format = p.str("format", "csv");
    seed_of(p);
    p.check_consumed("query");
    auto index = load_index(ds, space);
    auto result = index.query(seeds, k, *agg);
    if (format == "json") {
      emit(p, to_json(result).dump(2) + "\n");
    } else if (format == "csv") {
      std::ostringstream s;
      csv::write_row(s, {"rank", "account_id", std::string(to_string(result.score_kind))});
      for (const auto& h : result.hits) csv::write_row(s, {std::to_string(h.rank), h.id, format_g9(h.score)});
      emit(p, s.str());
    } else {
      fail(ErrorKind::config, "--format must be csv or json");
    }
    return ok;
  }

  int cmd_expand(const Params& p) {
    auto ds = dataset(p);
    const auto space = p.required("space");
    const auto seeds = p.list("seeds");
    if (seeds.empty()) fail(ErrorKind::config, "--seeds is required");
    const auto k = detail::parse_ks({p.str("k", "10")}).front();
    const auto hops = p.num<int>("hops", 2);
    const auto mode_name = p.str("mode", "per_account");
    ExpandMode mode;
    if (mode_name == "per_account") {
      mode = ExpandMode::per_account;
    } else if (mode_name == "joint") {
      mode = ExpandMode::joint;
    } else {
      fail(ErrorKind::config, "--mode must be per_account or joint");
    }
    const auto agg = parse_aggregation(p.str("aggregation", "mean"));
    if (!agg) fail(ErrorKind::config, "--aggregation must be mean or min_dist");
    const auto accept_name = p.str("accept", "all");
    seed_of(p);
    p.check_consumed("expand");
    AcceptFn accept;
    if (accept_name == "labels") {
      if (!ds.labels) fail(ErrorKind::dataset, "--accept labels needs a dataset with labels.csv");
      accept = [&ds](const std::string& id) { return ds.labels->positive(id); };
    } else if (accept_name != "all") {
      fail(ErrorKind::config, "--accept must be all or labels");
    }
    auto index = load_index(ds, space);
    auto result = recursive_expand(index, seeds, k, hops, accept, *agg, mode);
    std::ostringstream s;
    csv::write_row(s, {"account_id", "hop", "parent", "score", "accepted"});
    for (const auto& f : result.found) {
      csv::write_row(s, {f.id, std::to_string(f.hop), f.parent, format_g9(f.score), f.accepted ? "1" : "0"});
    }
    emit(p, s.str());
    err_ << result.found.size() << " accounts found in " << result.hops_run << " hops";
    if (ds.labels) {
      std::size_t pos = 0;
      for (const auto& f : result.found) pos += ds.labels->positive(f.id) ? 1 : 0;
      err_ << "; " << pos << " labeled positive";
    }
    err_ << "\n";
    return ok;
  }

  int cmd_eval(const Params& p) {
    auto ds = dataset(p);
    const auto spaces = p.list("space");
    if (spaces.empty()) fail(ErrorKind::config, "--space is required");
    const auto ks = detail::parse_ks(p.has("k") ? p.list("k") : std::vector<std::string>{"10", "50"});
    const auto format = p.str("format", "table");
    std::optional<LabelSet> labels = ds.labels;
    if (p.has("labels")) {
      auto in = io::open_in(p.required("labels"));
      labels = read_labels(in);
    }
    seed_of(p);
    p.check_consumed("eval");
    if (!labels) fail(ErrorKind::dataset, "no labels: pass --labels or add labels.csv to the dataset");
    std::vector<EvalReport> reports;
    for (const auto& space : spaces) {
      auto index = load_index(ds, space);
      reports.push_back(precision_at_k(index, *labels, ks));
      err_ << "evaluated " << space << "\n";
    }
    if (format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : reports) j.push_back(to_json(r));
      emit(p, j.dump(2) + "\n");
    } else if (format == "table") {
      std::ostringstream s;
      write_table(s, reports);
      emit(p, s.str());
    } else {
      fail(ErrorKind::config, "--format must be table or json");
    }
    return ok;
  }

  int cmd_project(const Params& p) {
    auto ds = dataset(p);
    const auto space = p.required("space");
    const auto method_name = p.str("method", "pca");
    TsneOptions opt;
    opt.seed = seed_of(p);
    opt.perplexity = p.num<double>("perplexity", opt.perplexity);
    opt.iters = p.num<int>("iters", opt.iters);
    p.check_consumed("project");
    ProjectionMethod method;
    if (method_name == "pca") {
      method = ProjectionMethod::pca;
    } else if (method_name == "tsne") {
      method = ProjectionMethod::tsne;
    } else {
      fail(ErrorKind::config, "--method must be pca or tsne");
    }
    const auto meta = read_space_meta(ds.dir, space);
    if (meta.value("realization", std::string("embedding")) != "embedding") {
      fail(ErrorKind::config, "space '" + space + "' has no vectors to project");
    }
    const auto emb = load_embedding(ds.dir, space);
    const auto xy = project_2d(emb, method, opt);
    std::vector<std::string> labels(emb.ids.size());
    if (ds.labels) {
      for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(ds.labels->label(emb.ids[i]));
    }
    std::ostringstream s;
    write_projection_csv(s, emb.ids, xy, labels);
    emit(p, s.str());
    return ok;
  }

  int cmd_randstring(const Params& p) {
    const auto action = p.required("action");
    if (action == "score") {
      const auto model_path = p.required("model");
      const auto in_path = p.str("in", "");
      p.check_consumed("randstring score");
      const auto model = randstring::model_from_json(nlohmann::json::parse(io::read_file(model_path)));
      std::ifstream file;
      if (!in_path.empty()) file = io::open_in(in_path);
      std::istream& in = in_path.empty() ? std::cin : file;
      std::ostringstream s;
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        csv::write_row(s, {line, format_g9(randstring::predict(model, line))});
      }
      emit(p, s.str());
      return ok;
    }
    if (action != "train" && action != "bench") fail(ErrorKind::config, "action must be train, score or bench");
    randstring::TrainOptions opt;
    opt.seed = seed_of(p);
    opt.epochs = p.num<int>("epochs", opt.epochs);
    opt.lr = p.num<double>("lr", opt.lr);
    opt.l2 = p.num<double>("l2", opt.l2);
    const auto n = p.num<std::size_t>("n", 10000);
    if (action == "train") p.required("out");
    p.check_consumed("randstring " + action);
    const auto start = std::chrono::steady_clock::now();
    const auto bench = randstring::make_benchmark(n, opt.seed);
    const auto model = randstring::train(bench.train_pos, bench.train_neg, opt);
    const double acc = randstring::accuracy(model, bench.test_pos, bench.test_neg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err_ << "held-out accuracy " << format_g9(acc) << " on " << bench.test_pos.size() + bench.test_neg.size()
         << " names (" << format_g9(secs) << " s)\n";
    if (action == "train") {
      emit(p, randstring::to_json(model).dump() + "\n");
    } else {
      emit(p, nlohmann::json({{"accuracy", acc}, {"test_names", bench.test_pos.size() + bench.test_neg.size()},
                              {"seed", opt.seed}})
                      .dump(2) +
                  "\n");
    }
    return ok;
  }

  int cmd_serve(const Params& p) {
    service::Config cfg;
    cfg.data_root = p.required("root");
    cfg.session_dir = p.str("sessions", "");
    if (p.has("randstring_model")) cfg.randstring_model = p.required("randstring_model");
    const auto host = p.str("host", "127.0.0.1");
    const auto port = p.num<int>("port", 8080);
    const auto static_dir = p.str("static", "");
    seed_of(p);
    p.check_consumed("serve");
    service::Service svc(cfg);
    service::HttpServer http(svc, static_dir);
    const int bound = http.bind(host, port);
    err_ << "listening on http://" << host << ":" << bound << "\n";
    http.run();
    return ok;
  }

  std::ostream& out_;
  std::ostream& err_;
  std::map<std::string, std::unique_ptr<detail::Command>> commands_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace botmatch::cli

#endif  // BOTMATCH_CLI_HPP
