#ifndef BOTMATCH_INGEST_HPP
#define BOTMATCH_INGEST_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "botmatch/csv.hpp"
#include "botmatch/error.hpp"
#include "botmatch/unicode.hpp"
#include "json.hpp"

namespace botmatch {

enum class EdgeType : std::uint8_t { mention = 0, retweet = 1, reply = 2 };

constexpr std::string_view to_string(EdgeType t) {
  switch (t) {
    case EdgeType::mention: return "mention";
    case EdgeType::retweet: return "retweet";
    case EdgeType::reply: return "reply";
  }
  return "mention";
}

inline std::optional<EdgeType> parse_edge_type(std::string_view s) {
  if (s == "mention") return EdgeType::mention;
  if (s == "retweet") return EdgeType::retweet;
  if (s == "reply") return EdgeType::reply;
  return std::nullopt;
}

struct RawPost {
  std::string post_id;
  std::string author_id;
  std::string author_screen_name;
  std::string text;
  std::optional<std::string> retweeted_author_id;
  std::optional<std::string> replied_author_id;
  std::vector<std::string> mentioned_author_ids;
  std::optional<std::string> timestamp;

  bool operator==(const RawPost&) const = default;
};

struct AccountRecord {
  std::string account_id;
  std::string screen_name;
  std::string raw_text;
  std::vector<std::string> clean_text;
  std::size_t n_posts = 0;
  double retweet_fraction = 0.0;

  bool operator==(const AccountRecord&) const = default;
};

struct EdgeRecord {
  std::string source;
  std::string target;
  EdgeType edge_type = EdgeType::mention;
  std::uint64_t weight = 1;

  auto key() const { return std::tie(source, target, edge_type); }
  bool operator==(const EdgeRecord&) const = default;
};

inline bool operator<(const EdgeRecord& a, const EdgeRecord& b) { return a.key() < b.key(); }

enum class PostFormat { jsonl, csv };

struct ParseResult {
  std::vector<RawPost> posts;
  std::size_t skipped = 0;
  std::size_t lines = 0;
};

namespace detail {

inline void dedup_in_order(std::vector<std::string>& ids) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (auto& id : ids) {
    if (!id.empty() && seen.insert(id).second) out.push_back(std::move(id));
  }
  ids = std::move(out);
}

inline std::optional<std::string> json_string(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  return std::nullopt;
}

inline std::optional<std::string> json_field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object()) return std::nullopt;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return json_string(*it);
}

inline std::optional<RawPost> parse_json_post(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  RawPost p;
  auto id = json_field(j, "id");
  if (!id) id = json_field(j, "id_str");
  auto user = j.find("user");
  if (!id || user == j.end() || !user->is_object()) return std::nullopt;
  auto author = json_field(*user, "id_str");
  if (!author) author = json_field(*user, "id");
  if (!author || id->empty() || author->empty()) return std::nullopt;
  p.post_id = *id;
  p.author_id = *author;
  p.author_screen_name = json_field(*user, "screen_name").value_or("");
  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) {
    text = j.find("full_text");
    if (text == j.end() || !text->is_string()) return std::nullopt;
  }
  p.text = text->get<std::string>();
  if (auto rt = j.find("retweeted_status"); rt != j.end() && rt->is_object()) {
    if (auto ru = rt->find("user"); ru != rt->end()) {
      auto rid = json_field(*ru, "id_str");
      if (!rid) rid = json_field(*ru, "id");
      if (rid && !rid->empty()) p.retweeted_author_id = *rid;
    }
  }
  if (auto reply = json_field(j, "in_reply_to_user_id_str"); reply && !reply->empty()) {
    p.replied_author_id = *reply;
  }
  if (auto ent = j.find("entities"); ent != j.end() && ent->is_object()) {
    if (auto um = ent->find("user_mentions"); um != ent->end() && um->is_array()) {
      for (const auto& m : *um) {
        auto mid = json_field(m, "id_str");
        if (!mid) mid = json_field(m, "id");
        if (mid) p.mentioned_author_ids.push_back(*mid);
      }
    }
  }
  p.timestamp = json_field(j, "created_at");
  dedup_in_order(p.mentioned_author_ids);
  return p;
}

inline const csv::Row& post_csv_header() {
  static const csv::Row header{"post_id",          "author_id",         "author_screen_name",
                               "text",             "retweeted_author_id", "replied_author_id",
                               "mentioned_author_ids", "timestamp"};
  return header;
}

inline std::optional<RawPost> parse_csv_post(const csv::Row& row) {
  if (row.size() != post_csv_header().size()) return std::nullopt;
  if (row[0].empty() || row[1].empty()) return std::nullopt;
  RawPost p;
  p.post_id = row[0];
  p.author_id = row[1];
  p.author_screen_name = row[2];
  p.text = row[3];
  if (!row[4].empty()) p.retweeted_author_id = row[4];
  if (!row[5].empty()) p.replied_author_id = row[5];
  std::string token;
  std::istringstream mentions(row[6]);
  while (std::getline(mentions, token, ';')) p.mentioned_author_ids.push_back(token);
  dedup_in_order(p.mentioned_author_ids);
  if (!row[7].empty()) p.timestamp = row[7];
  return p;
}

}  // namespace detail

/// Parses a post corpus. JSONL uses the tweet-style subset (`id`, `user.id_str`,
/// `user.screen_name`, `text`, `retweeted_status.user.id_str`,
/// `in_reply_to_user_id_str`, `entities.user_mentions[].id_str`); CSV uses
/// the header from `detail::post_csv_header()` with `;`-separated mention ids.
/// Blank lines are ignored. Malformed records are skipped and counted; more
/// than half malformed is a format error.
inline ParseResult parse_posts(std::istream& in, PostFormat format) {
  if (!in) fail(ErrorKind::io, "post stream is not readable");
  ParseResult result;
  if (format == PostFormat::jsonl) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      ++result.lines;
      if (auto p = detail::parse_json_post(line)) {
        result.posts.push_back(std::move(*p));
      } else {
        ++result.skipped;
      }
    }
  } else {
    if (in.peek() == std::char_traits<char>::eof()) return result;
    csv::expect_header(in, detail::post_csv_header(), "post CSV");
    bool ok = true;
    while (auto row = csv::read_row(in, &ok)) {
      if (row->size() == 1 && row->front().empty()) continue;
      ++result.lines;
      auto p = ok ? detail::parse_csv_post(*row) : std::nullopt;
      if (p) {
        result.posts.push_back(std::move(*p));
      } else {
        ++result.skipped;
      }
    }
  }
  if (in.bad()) fail(ErrorKind::io, "read error while parsing posts");
  if (result.lines > 0 && 2 * result.skipped > result.lines) {
    fail(ErrorKind::format, std::to_string(result.skipped) + " of " +
                                std::to_string(result.lines) + " records are malformed");
  }
  return result;
}

inline void write_posts_csv(std::ostream& out, const std::vector<RawPost>& posts) {
  csv::write_row(out, detail::post_csv_header());
  for (const auto& p : posts) {
    std::string mentions;
    for (std::size_t i = 0; i < p.mentioned_author_ids.size(); ++i) {
      if (i) mentions += ';';
      mentions += p.mentioned_author_ids[i];
    }
    csv::write_row(out, {p.post_id, p.author_id, p.author_screen_name, p.text,
                         p.retweeted_author_id.value_or(""), p.replied_author_id.value_or(""),
                         mentions, p.timestamp.value_or("")});
  }
}

/// One record per (source, target, type), weight = multiplicity, sorted by
/// (source, target, type). Retweets point retweeter -> original author,
/// replies replier -> replied author, mentions author -> each mentioned id.
/// Self-loops are dropped. Only top-level mention entities are counted.
inline std::vector<EdgeRecord> build_edges(const std::vector<RawPost>& posts) {
  std::map<std::tuple<std::string, std::string, EdgeType>, std::uint64_t> counts;
  auto add = [&](const std::string& src, const std::string& dst, EdgeType t) {
    if (src != dst && !dst.empty()) ++counts[{src, dst, t}];
  };
  for (const auto& p : posts) {
    if (p.retweeted_author_id) add(p.author_id, *p.retweeted_author_id, EdgeType::retweet);
    if (p.replied_author_id) add(p.author_id, *p.replied_author_id, EdgeType::reply);
    for (const auto& m : p.mentioned_author_ids) add(p.author_id, m, EdgeType::mention);
  }
  std::vector<EdgeRecord> edges;
  edges.reserve(counts.size());
  for (const auto& [key, w] : counts) {
    edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
  }
  return edges;
}

namespace detail {

inline bool is_smiley(std::string_view chunk) {
  static const std::set<std::string_view> smileys{
      ":)",  ":(",  ":D",  ";)",  ":P",  ":p",  "xD",  "XD",  "<3",  "</3", ":-)", ":-(",
      ":-D", ";-)", ":'(", ":o",  ":O",  "^_^", "-_-", ":/",  ":-/", ":|",  ":*",  ";-P",
      ":-P", "=)",  "=(",  "(:",  "):",  ":3",  "^^",  "T_T", ":]",  ":[",  "8)",  "B)"};
  return smileys.count(chunk) > 0;
}

// Position where a URL begins inside a whitespace-delimited chunk, or npos.
inline std::size_t url_start(std::string_view chunk) {
  std::string lower(chunk);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::size_t best = std::string::npos;
  for (std::string_view pat : {"http://", "https://", "www.", "t.co/"}) {
    for (std::size_t pos = lower.find(pat); pos != std::string::npos;
         pos = lower.find(pat, pos + 1)) {
      const bool boundary =
          pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
      if (boundary) {
        best = std::min(best, pos);
        break;
      }
    }
  }
  return best;
}

inline bool is_word_cp(char32_t cp) {
  return !unicode::is_space(cp) && !unicode::is_punct(cp) && !unicode::is_emoji(cp) &&
         !unicode::is_control(cp);
}

}  // namespace detail

/// Lowercased token stream with URLs, punctuation, emoji, smileys and the
/// reserved words "rt"/"via" removed. `#tag` and `@handle` tokens keep their
/// prefix unless `strip_tags` is set, in which case they are dropped.
/// Tokens of any script are kept; '_' counts as a word character.
inline std::vector<std::string> clean_text(std::string_view raw, bool strip_tags) {
  std::vector<std::string> tokens;
  const std::u32string cps = unicode::decode(raw);

  auto emit = [&](std::u32string& tok) {
    if (tok.empty()) return;
    const bool tag = tok[0] == U'#' || tok[0] == U'@';
    if (tag && tok.size() == 1) {
      tok.clear();
      return;
    }
    for (auto& cp : tok) cp = unicode::to_lower(cp);
    std::string s = unicode::encode(tok);
    tok.clear();
    if (s == "rt" || s == "via") return;
    if (tag && strip_tags) return;
    tokens.push_back(std::move(s));
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && unicode::is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !unicode::is_space(cps[j])) ++j;
    if (i == j) break;
    std::u32string_view chunk32(cps.data() + i, j - i);
    const std::string chunk = unicode::encode(chunk32);
    i = j;
    if (detail::is_smiley(chunk)) continue;

    // URL detection runs on bytes; translate the cut point back to code points.
    std::u32string body(chunk32);
    if (auto cut = detail::url_start(chunk); cut != std::string::npos) {
      body = unicode::decode(std::string_view(chunk).substr(0, cut));
    }

    std::u32string tok;
    for (std::size_t k = 0; k < body.size(); ++k) {
      const char32_t cp = body[k];
      if (detail::is_word_cp(cp)) {
        tok.push_back(cp);
      } else if ((cp == U'#' || cp == U'@') && tok.empty() && k + 1 < body.size() &&
                 detail::is_word_cp(body[k + 1])) {
        tok.push_back(cp);
      } else {
        emit(tok);
      }
    }
    emit(tok);
  }
  return tokens;
}

struct PruneStats {
  std::size_t authors = 0;
  std::size_t edges_in = 0;
  std::size_t dangling_edges_removed = 0;
  std::size_t isolates_removed = 0;
};

struct Dataset {
  std::vector<AccountRecord> accounts;  // sorted by account_id
  std::vector<EdgeRecord> edges;        // sorted by (source, target, type)
  PruneStats stats;
};

/// Removes edges that touch unknown accounts or are self-loops, then isolated
/// accounts, until nothing changes. An empty result is a dataset error.
inline Dataset prune_dataset(std::vector<AccountRecord> accounts, std::vector<EdgeRecord> edges) {
  std::set<std::string> alive;
  for (const auto& a : accounts) alive.insert(a.account_id);
  Dataset ds;
  ds.stats.authors = accounts.size();
  ds.stats.edges_in = edges.size();
  std::sort(edges.begin(), edges.end());
  for (;;) {
    const std::size_t before = edges.size();
    std::erase_if(edges, [&](const EdgeRecord& e) {
      return e.source == e.target || !alive.count(e.source) || !alive.count(e.target);
    });
    ds.stats.dangling_edges_removed += before - edges.size();
    std::set<std::string> touched;
    for (const auto& e : edges) {
      touched.insert(e.source);
      touched.insert(e.target);
    }
    const std::size_t isolates = alive.size() - touched.size();
    ds.stats.isolates_removed += isolates;
    alive = std::move(touched);
    if (isolates == 0 && before == edges.size()) break;
  }
  if (alive.empty()) {
    fail(ErrorKind::dataset,
         "empty dataset after pruning: " + std::to_string(ds.stats.authors) + " authors, " +
             std::to_string(ds.stats.edges_in) + " edges in, " +
             std::to_string(ds.stats.dangling_edges_removed) + " dangling edges removed, " +
             std::to_string(ds.stats.isolates_removed) + " isolates removed");
  }
  std::sort(accounts.begin(), accounts.end(),
            [](const auto& a, const auto& b) { return a.account_id < b.account_id; });
  for (auto& a : accounts) {
    if (alive.count(a.account_id)) ds.accounts.push_back(std::move(a));
  }
  ds.edges = std::move(edges);
  return ds;
}

/// Aggregates posts per author and prunes the graph: edges touching accounts
/// that authored nothing are removed, then isolates are removed, repeated to a
/// fixpoint. An empty result is a dataset error.
inline Dataset assemble_dataset(const std::vector<RawPost>& posts,
                                const std::vector<EdgeRecord>& edges, bool strip_tags = false) {
  std::map<std::string, AccountRecord> by_id;
  std::map<std::string, std::size_t> retweets;
  for (const auto& p : posts) {
    auto& acc = by_id[p.author_id];
    if (acc.account_id.empty()) acc.account_id = p.author_id;
    if (acc.screen_name.empty()) acc.screen_name = p.author_screen_name;
    if (!acc.raw_text.empty()) acc.raw_text.push_back('\n');
    acc.raw_text += p.text;
    auto toks = clean_text(p.text, strip_tags);
    acc.clean_text.insert(acc.clean_text.end(), std::make_move_iterator(toks.begin()),
                          std::make_move_iterator(toks.end()));
    ++acc.n_posts;
    if (p.retweeted_author_id) ++retweets[p.author_id];
  }

  std::vector<AccountRecord> accounts;
  accounts.reserve(by_id.size());
  for (auto& [id, acc] : by_id) {
    acc.retweet_fraction =
        static_cast<double>(retweets[id]) / static_cast<double>(acc.n_posts);
    accounts.push_back(std::move(acc));
  }
  return prune_dataset(std::move(accounts), edges);
}

}  // namespace botmatch

#endif  // BOTMATCH_INGEST_HPP
