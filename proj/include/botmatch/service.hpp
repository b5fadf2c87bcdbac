#ifndef BOTMATCH_SERVICE_HPP
#define BOTMATCH_SERVICE_HPP

// JSON service over a directory of datasets. `Service::handle` holds all the
// routing and state; `HttpServer` (service_http.hpp) puts it behind cpp-httplib.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "botmatch/dataset.hpp"
#include "botmatch/error.hpp"
#include "botmatch/io.hpp"
#include "botmatch/knn.hpp"
#include "botmatch/pipeline.hpp"
#include "botmatch/projection.hpp"
#include "botmatch/randstring.hpp"
#include "json.hpp"

namespace botmatch::service {

namespace fs = std::filesystem;
using nlohmann::json;

struct Config {
  fs::path data_root;           // one sub-directory per dataset
  fs::path session_dir;         // defaults to <data_root>/.sessions
  std::optional<fs::path> randstring_model;
  std::function<std::chrono::system_clock::time_point()> clock = [] {
    return std::chrono::system_clock::now();
  };
};

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  json body;
  std::string raw;  // sent as-is when non-empty
  std::string content_type = "application/json";

  std::string text() const { return raw.empty() ? body.dump() : raw; }
};

/// Error that maps to an HTTP status and a machine-readable code.
struct ApiError {
  int status;
  std::string code;
  std::string message;
};

inline std::string iso8601(std::chrono::system_clock::time_point t) {
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(t);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t - secs).count();
  const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

inline bool valid_flag_state(const std::string& s) {
  return s == "suspicious" || s == "benign" || s == "unknown";
}

/// Most frequent '#' tokens, ties by tag.
inline json top_hashtags(const AccountRecord& a, std::size_t n = 5) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : a.clean_text) {
    if (t.size() > 1 && t.front() == '#') ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> tags(counts.begin(), counts.end());
  std::stable_sort(tags.begin(), tags.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  json out = json::array();
  for (std::size_t i = 0; i < tags.size() && i < n; ++i) out.push_back({{"tag", tags[i].first}, {"count", tags[i].second}});
  return out;
}

class Service {
 public:
  explicit Service(Config cfg) : cfg_(std::move(cfg)) {
    if (!fs::is_directory(cfg_.data_root)) {
      fail(ErrorKind::io, "data root '" + cfg_.data_root.string() + "' is not a directory");
    }
    if (cfg_.session_dir.empty()) cfg_.session_dir = cfg_.data_root / ".sessions";
    fs::create_directories(cfg_.session_dir);
    if (cfg_.randstring_model) {
      model_ = std::make_shared<randstring::LogisticModel>(
          randstring::model_from_json(parse_json_file(*cfg_.randstring_model)));
    }
  }

  Response handle(const Request& req) {
    try {
      return route(req);
    } catch (const ApiError& e) {
      return error(e.status, e.code, e.message);
    } catch (const Error& e) {
      return error(status_for(e.kind()), std::string(to_string(e.kind())) + "_error", e.what());
    } catch (const json::exception& e) {
      return error(400, "invalid_body", e.what());
    } catch (const std::exception& e) {
      return error(500, "internal_error", e.what());
    }
  }

  const Config& config() const { return cfg_; }

 private:
  struct Loaded {
    StoredDataset data;
    std::unique_ptr<std::mutex> model_once = std::make_unique<std::mutex>();
    std::shared_ptr<const randstring::LogisticModel> model;
  };

  struct SessionSlot {
    std::mutex mutex;
  };

  // ---- helpers ----------------------------------------------------------

  static Response error(int status, const std::string& code, const std::string& message) {
    Response r;
    r.status = status;
    r.body = {{"error", {{"code", code}, {"message", message}}}};
    return r;
  }

  static int status_for(ErrorKind k) {
    switch (k) {
      case ErrorKind::io:
      case ErrorKind::format:
      case ErrorKind::spectral:
      case ErrorKind::training:
      case ErrorKind::construction:
        return 500;
      default:
        return 400;
    }
  }

  static json parse_json_file(const fs::path& p) {
    try {
      return json::parse(io::read_file(p));
    } catch (const json::exception& e) {
      fail(ErrorKind::format, "bad JSON in '" + p.string() + "': " + e.what());
    }
  }

  static json parse_body(const Request& req) {
    if (req.body.empty()) return json::object();
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      throw ApiError{400, "invalid_body", std::string("body is not JSON: ") + e.what()};
    }
    if (!body.is_object()) throw ApiError{400, "invalid_body", "body must be a JSON object"};
    return body;
  }

  static std::optional<std::string> request_id(const Request& req, const json& body) {
    if (auto it = body.find("request_id"); it != body.end() && it->is_string()) return it->get<std::string>();
    if (auto it = req.headers.find("idempotency-key"); it != req.headers.end() && !it->second.empty()) {
      return it->second;
    }
    return std::nullopt;
  }

  static bool safe_name(const std::string& s) {
    return !s.empty() && s.size() <= 128 && s.front() != '.' &&
           std::all_of(s.begin(), s.end(), [](char c) {
             return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
           });
  }

  std::string now() const { return iso8601(cfg_.clock()); }

  static std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path) {
      if (c == '/') {
        if (!cur.empty()) parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
  }

  // ---- datasets -----------------------------------------------------------

  std::vector<std::string> dataset_names() const {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(cfg_.data_root)) {
      const auto name = entry.path().filename().string();
      if (entry.is_directory() && safe_name(name) && fs::exists(entry.path() / "accounts.csv")) {
        names.push_back(name);
      }
    }
    std::sort(names.begin(), names.end());
    return names;
  }

  std::shared_ptr<Loaded> dataset(const std::string& name) {
    {
      std::shared_lock lock(cache_mutex_);
      if (auto it = datasets_.find(name); it != datasets_.end()) return it->second;
    }
    if (!safe_name(name) || !fs::exists(cfg_.data_root / name / "accounts.csv")) {
      throw ApiError{404, "dataset_not_found", "dataset '" + name + "' not found"};
    }
    auto loaded = std::make_shared<Loaded>();
    loaded->data = load_dataset(cfg_.data_root / name);
    std::unique_lock lock(cache_mutex_);
    return datasets_.emplace(name, std::move(loaded)).first->second;
  }

  std::shared_ptr<const SearchIndex> index(const std::string& ds_name, const std::string& space) {
    const auto key = ds_name + "/" + space;
    {
      std::shared_lock lock(cache_mutex_);
      if (auto it = indexes_.find(key); it != indexes_.end()) return it->second;
    }
    auto ds = dataset(ds_name);
    if (!valid_space_name(space) || !fs::exists(space_meta_path(ds->data.dir, space))) {
      throw ApiError{404, "space_not_found", "space '" + space + "' not found in dataset '" + ds_name + "'"};
    }
    auto idx = std::make_shared<const SearchIndex>(load_index(ds->data, space));
    std::unique_lock lock(cache_mutex_);
    return indexes_.emplace(key, std::move(idx)).first->second;
  }

  std::shared_ptr<const randstring::LogisticModel> name_model(Loaded& ds) {
    if (model_) return model_;
    std::lock_guard lock(*ds.model_once);
    if (ds.model) return ds.model;
    const auto p = ds.data.dir / "randstring.json";
    if (fs::exists(p)) {
      ds.model = std::make_shared<randstring::LogisticModel>(randstring::model_from_json(parse_json_file(p)));
    } else {
      std::lock_guard dlock(default_model_mutex_);
      if (!default_model_) {
        default_model_ = std::make_shared<randstring::LogisticModel>(
            randstring::train(randstring::gen_random_names(2000, 1), randstring::gen_handle_names(2000, 2)));
      }
      ds.model = default_model_;
    }
    return ds.model;
  }

  json card(Loaded& ds, const std::string& id, const json* flags = nullptr) {
    const auto* a = ds.data.account(id);
    if (!a) throw ApiError{404, "account_not_found", "account '" + id + "' not found"};
    json c = {{"account_id", a->account_id},
              {"screen_name", a->screen_name},
              {"n_posts", a->n_posts},
              {"retweet_fraction", a->retweet_fraction},
              {"top_hashtags", top_hashtags(*a)}};
    if (const auto v = ds.data.graph.find(id)) {
      c["in_degree"] = ds.data.graph.in_degree(*v);
      c["out_degree"] = ds.data.graph.out_degree(*v);
    }
    c["randstring_probability"] =
        a->screen_name.empty() ? json(nullptr) : json(randstring::predict(*name_model(ds), a->screen_name));
    if (ds.data.labels) c["label"] = ds.data.labels->label(id);
    if (flags) {
      if (auto it = flags->find(id); it != flags->end()) c["flag"] = (*it)["state"];
    }
    return c;
  }

  // ---- sessions -----------------------------------------------------------

  fs::path session_path(const std::string& id) const { return cfg_.session_dir / (id + ".json"); }

  std::mutex& session_mutex(const std::string& id) {
    std::lock_guard lock(slots_mutex_);
    auto& slot = slots_[id];
    if (!slot) slot = std::make_unique<SessionSlot>();
    return slot->mutex;
  }

  json read_session(const std::string& id) const {
    if (!safe_name(id) || !fs::exists(session_path(id))) {
      throw ApiError{404, "session_not_found", "session '" + id + "' not found"};
    }
    return parse_json_file(session_path(id));
  }

  void write_session(const json& s) const {
    io::write_file_atomic(session_path(s.at("session_id").get<std::string>()), s.dump(2) + "\n");
  }

  std::string new_session_id(const std::optional<std::string>& rid) {
    if (rid) {
      // Retries of the same create land on the same session.
      return "s" + hex(std::hash<std::string>{}("create:" + *rid));
    }
    std::lock_guard lock(slots_mutex_);
    for (;;) {
      const auto id = "s" + hex(id_rng_());
      if (!fs::exists(session_path(id))) return id;
    }
  }

  static std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
  }

  /// Portable part of a session; export and import use exactly this.
  static json exported(const json& s) {
    return {{"format", "botmatch-session/1"},
            {"dataset", s.at("dataset")},
            {"active_space", s.at("active_space")},
            {"created_at", s.at("created_at")},
            {"history", s.at("history")},
            {"flags", s.at("flags")},
            {"notes", s.at("notes")}};
  }

  static json public_view(const json& s) {
    json out = exported(s);
    out.erase("format");
    out["session_id"] = s.at("session_id");
    out["updated_at"] = s.at("updated_at");
    return out;
  }

  void check_import(const json& imp, Loaded& ds) {
    if (imp.value("format", "") != "botmatch-session/1") {
      throw ApiError{400, "invalid_import", "unsupported session export format"};
    }
    for (const char* key : {"history", "flags", "notes", "created_at", "active_space"}) {
      if (!imp.contains(key)) throw ApiError{400, "invalid_import", std::string("export lacks '") + key + "'"};
    }
    std::set<std::string> seen;
    for (const auto& q : imp.at("history")) {
      const auto& parent = q.at("parent");
      if (!parent.is_null() && !seen.count(parent.get<std::string>())) {
        throw ApiError{400, "invalid_import", "history parent precedes its child"};
      }
      seen.insert(q.at("query_id").get<std::string>());
    }
    for (const auto& [id, f] : imp.at("flags").items()) {
      if (!ds.data.account(id)) throw ApiError{404, "account_not_found", "flagged account '" + id + "' not found"};
      if (!valid_flag_state(f.at("state").get<std::string>())) {
        throw ApiError{400, "invalid_flag", "bad flag state for '" + id + "'"};
      }
    }
  }

  Response create_session(const Request& req) {
    const json body = parse_body(req);
    const auto rid = request_id(req, body);
    const auto id = new_session_id(rid);
    std::lock_guard lock(session_mutex(id));
    if (rid && fs::exists(session_path(id))) {
      Response r;
      r.status = 201;
      r.body = public_view(read_session(id));
      return r;
    }
    json s;
    if (body.contains("import")) {
      const json& imp = body.at("import");
      auto ds = dataset(imp.at("dataset").get<std::string>());
      check_import(imp, *ds);
      s = imp;
      s.erase("format");
    } else {
      if (!body.contains("dataset")) throw ApiError{400, "invalid_body", "'dataset' is required"};
      const auto name = body.at("dataset").get<std::string>();
      dataset(name);
      const auto stamp = now();
      s = {{"dataset", name},
           {"active_space", body.value("space", json(nullptr))},
           {"created_at", stamp},
           {"history", json::array()},
           {"flags", json::object()},
           {"notes", body.value("notes", std::string())}};
      if (!s["active_space"].is_null()) index(name, s["active_space"].get<std::string>());
    }
    s["session_id"] = id;
    s["updated_at"] = s.at("created_at");
    s["requests"] = json::object();
    write_session(s);
    Response r;
    r.status = 201;
    r.body = public_view(s);
    return r;
  }

  /// Runs `mutate` under the session lock with request-id replay.
  Response mutate_session(const Request& req, const std::string& id,
                          const std::function<Response(json& session, const json& body)>& mutate) {
    const json body = parse_body(req);
    const auto rid = request_id(req, body);
    std::lock_guard lock(session_mutex(id));
    json s = read_session(id);
    if (rid) {
      if (auto it = s["requests"].find(*rid); it != s["requests"].end()) {
        Response r;
        r.status = (*it).at("status").get<int>();
        r.body = (*it).at("body");
        return r;
      }
    }
    Response r = mutate(s, body);
    if (r.status < 300) {
      s["updated_at"] = now();
      if (rid) s["requests"][*rid] = {{"status", r.status}, {"body", r.body}};
      write_session(s);
    }
    return r;
  }

  Response run_query(json& s, const json& body) {
    const auto ds_name = s.at("dataset").get<std::string>();
    auto ds = dataset(ds_name);
    std::string space;
    if (body.contains("space")) {
      space = body.at("space").get<std::string>();
    } else if (s.at("active_space").is_string()) {
      space = s.at("active_space").get<std::string>();
    } else {
      throw ApiError{400, "invalid_body", "'space' is required"};
    }
    const json k_json = body.value("k", json(10));
    if (!k_json.is_number_integer() || k_json.get<long long>() < 1) {
      throw ApiError{400, "invalid_k", "k must be a positive integer"};
    }
    const auto k = k_json.get<std::size_t>();
    const auto agg_name = body.value("aggregation", std::string("mean"));
    const auto agg = parse_aggregation(agg_name);
    if (!agg) throw ApiError{400, "invalid_aggregation", "aggregation must be mean or min_dist"};
    if (!body.contains("seeds") || !body.at("seeds").is_array() || body.at("seeds").empty()) {
      throw ApiError{400, "invalid_seeds", "seeds must be a non-empty array"};
    }
    const auto seeds = body.at("seeds").get<std::vector<std::string>>();
    auto idx = index(ds_name, space);
    for (const auto& seed : seeds) {
      if (!idx->contains(seed)) throw ApiError{404, "account_not_found", "seed '" + seed + "' not found"};
    }
    const auto result = idx->query(seeds, k, *agg);

    auto& history = s.at("history");
    json parent = nullptr;
    const std::set<std::string> seed_set(seeds.begin(), seeds.end());
    for (auto it = history.rbegin(); it != history.rend() && parent.is_null(); ++it) {
      bool touches = false;
      for (const auto& x : (*it).at("seeds")) touches = touches || seed_set.count(x.get<std::string>());
      for (const auto& h : (*it).at("hits")) touches = touches || seed_set.count(h.at("id").get<std::string>());
      if (touches) parent = (*it).at("query_id");
    }
    const std::string qid = "q" + std::to_string(history.size() + 1);
    json entry = to_json(result);
    entry["query_id"] = qid;
    entry["parent"] = parent;
    entry["aggregation"] = agg_name;
    entry["created_at"] = now();
    history.push_back(entry);
    s["active_space"] = space;

    json cards = json::array();
    for (const auto& h : result.hits) cards.push_back(card(*ds, h.id, &s.at("flags")));
    Response r;
    r.body = entry;
    r.body["cards"] = std::move(cards);
    return r;
  }

  Response set_flags(json& s, const json& body) {
    auto ds = dataset(s.at("dataset").get<std::string>());
    json updates = json::array();
    if (body.contains("flags")) {
      updates = body.at("flags");
    } else {
      updates.push_back(body);
    }
    // Validate all before applying any.
    for (const auto& f : updates) {
      if (!f.contains("account_id") || !f.at("account_id").is_string()) {
        throw ApiError{400, "invalid_flag", "flag needs an account_id"};
      }
      const auto state = f.value("state", std::string());
      if (!valid_flag_state(state)) {
        throw ApiError{400, "invalid_flag", "state must be suspicious, benign or unknown"};
      }
      if (!ds->data.account(f.at("account_id").get<std::string>())) {
        throw ApiError{404, "account_not_found", "account '" + f.at("account_id").get<std::string>() + "' not found"};
      }
    }
    const auto stamp = now();
    for (const auto& f : updates) {
      json entry = {{"state", f.at("state")}, {"updated_at", stamp}};
      if (f.contains("note")) entry["note"] = f.at("note");
      s["flags"][f.at("account_id").get<std::string>()] = entry;
    }
    Response r;
    r.body = {{"flags", s.at("flags")}};
    return r;
  }

  // ---- routing ------------------------------------------------------------

  Response route(const Request& req) {
    const auto parts = split_path(req.path);
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    auto ok = [](json body) {
      Response r;
      r.body = std::move(body);
      return r;
    };
    auto param = [&](const std::string& key) -> std::optional<std::string> {
      auto it = req.query.find(key);
      if (it == req.query.end()) return std::nullopt;
      return it->second;
    };

    if (get && parts.size() == 1 && parts[0] == "health") return ok({{"status", "ok"}});

    if (parts.size() >= 1 && parts[0] == "datasets") {
      if (get && parts.size() == 1) {
        json out = json::array();
        for (const auto& name : dataset_names()) {
          const auto dir = cfg_.data_root / name;
          out.push_back({{"name", name}, {"spaces", list_spaces(dir)}, {"has_labels", fs::exists(dir / "labels.csv")}});
        }
        return ok(out);
      }
      if (get && parts.size() == 3 && parts[2] == "spaces") {
        auto ds = dataset(parts[1]);
        json out = json::array();
        for (const auto& name : list_spaces(ds->data.dir)) out.push_back(read_space_meta(ds->data.dir, name));
        return ok(out);
      }
      if (get && parts.size() == 4 && parts[2] == "accounts") {
        auto ds = dataset(parts[1]);
        return ok(card(*ds, parts[3]));
      }
      if (get && parts.size() == 3 && parts[2] == "projection") {
        return projection(parts[1], param("space"), param("method").value_or("pca"), param("format").value_or("json"),
                          param("seed"), param("perplexity"));
      }
    }

    if (parts.size() >= 1 && parts[0] == "sessions") {
      if (post && parts.size() == 1) return create_session(req);
      if (get && parts.size() == 2) {
        std::lock_guard lock(session_mutex(parts[1]));
        return ok(public_view(read_session(parts[1])));
      }
      if (get && parts.size() == 3 && parts[2] == "export") {
        std::lock_guard lock(session_mutex(parts[1]));
        Response r;
        r.raw = exported(read_session(parts[1])).dump(2) + "\n";
        return r;
      }
      if (post && parts.size() == 3 && parts[2] == "query") {
        return mutate_session(req, parts[1], [this](json& s, const json& b) { return run_query(s, b); });
      }
      if (post && parts.size() == 3 && parts[2] == "flags") {
        return mutate_session(req, parts[1], [this](json& s, const json& b) { return set_flags(s, b); });
      }
    }
    throw ApiError{404, "not_found", req.method + " " + req.path + " is not an endpoint"};
  }

  Response projection(const std::string& ds_name, const std::optional<std::string>& space,
                      const std::string& method_name, const std::string& format,
                      const std::optional<std::string>& seed_text, const std::optional<std::string>& perplexity) {
    if (!space) throw ApiError{400, "invalid_query", "'space' is required"};
    ProjectionMethod method;
    if (method_name == "pca") {
      method = ProjectionMethod::pca;
    } else if (method_name == "tsne") {
      method = ProjectionMethod::tsne;
    } else {
      throw ApiError{400, "invalid_method", "method must be pca or tsne"};
    }
    if (format != "json" && format != "csv") throw ApiError{400, "invalid_format", "format must be json or csv"};
    Params p;
    if (seed_text) p.set("seed", *seed_text);
    if (perplexity) p.set("perplexity", *perplexity);
    TsneOptions opt;
    opt.seed = p.num<std::uint64_t>("seed", 0);
    opt.perplexity = p.num<double>("perplexity", opt.perplexity);

    auto ds = dataset(ds_name);
    auto idx = index(ds_name, *space);
    const auto* emb = idx->embedding();
    if (!emb) throw ApiError{400, "unsupported_space", "space '" + *space + "' has no vectors to project"};

    const auto key = ds_name + "/" + *space + "/" + method_name + "/" + std::to_string(opt.seed) + "/" +
                     format_g9(opt.perplexity);
    std::shared_ptr<const Eigen::MatrixXd> xy;
    {
      std::shared_lock lock(cache_mutex_);
      if (auto it = projections_.find(key); it != projections_.end()) xy = it->second;
    }
    if (!xy) {
      xy = std::make_shared<const Eigen::MatrixXd>(project_2d(*emb, method, opt));
      std::unique_lock lock(cache_mutex_);
      projections_.emplace(key, xy);
    }
    std::vector<std::string> labels(emb->ids.size());
    if (ds->data.labels) {
      for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(ds->data.labels->label(emb->ids[i]));
    }
    Response r;
    if (format == "csv") {
      std::ostringstream out;
      write_projection_csv(out, emb->ids, *xy, labels);
      r.raw = out.str();
      r.content_type = "text/csv";
      return r;
    }
    json points = json::array();
    for (std::size_t i = 0; i < emb->ids.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      json pt = {{"account_id", emb->ids[i]}, {"x", (*xy)(row, 0)}, {"y", (*xy)(row, 1)}};
      if (!labels[i].empty()) pt["label"] = std::stoi(labels[i]);
      points.push_back(std::move(pt));
    }
    r.body = {{"space", *space}, {"method", method_name}, {"seed", opt.seed}, {"points", std::move(points)}};
    return r;
  }

  Config cfg_;
  std::shared_ptr<const randstring::LogisticModel> model_;
  std::mutex default_model_mutex_;
  std::shared_ptr<const randstring::LogisticModel> default_model_;

  std::shared_mutex cache_mutex_;
  std::map<std::string, std::shared_ptr<Loaded>> datasets_;
  std::map<std::string, std::shared_ptr<const SearchIndex>> indexes_;
  std::map<std::string, std::shared_ptr<const Eigen::MatrixXd>> projections_;

  std::mutex slots_mutex_;
  std::map<std::string, std::unique_ptr<SessionSlot>> slots_;
  std::mt19937_64 id_rng_{std::random_device{}()};
};

}  // namespace botmatch::service

#endif  // BOTMATCH_SERVICE_HPP
