#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "botmatch/ingest.hpp"
#include "botmatch/random.hpp"

using namespace botmatch;

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Hand-formatted tweet JSON, independent of the library's JSON reader.
std::string tweet_line(const RawPost& p) {
  std::string s = "{\"id\": \"" + p.post_id + "\", \"user\": {\"id_str\": \"" + p.author_id +
                  "\", \"screen_name\": \"" + p.author_screen_name + "\"}, \"text\": \"" +
                  json_escape(p.text) + "\"";
  if (p.retweeted_author_id) {
    s += ", \"retweeted_status\": {\"user\": {\"id_str\": \"" + *p.retweeted_author_id + "\"}}";
  }
  if (p.replied_author_id) s += ", \"in_reply_to_user_id_str\": \"" + *p.replied_author_id + "\"";
  s += ", \"entities\": {\"user_mentions\": [";
  for (std::size_t i = 0; i < p.mentioned_author_ids.size(); ++i) {
    s += (i ? ", " : "") + std::string("{\"id_str\": \"") + p.mentioned_author_ids[i] + "\"}";
  }
  s += "]}";
  if (p.timestamp) s += ", \"created_at\": \"" + *p.timestamp + "\"";
  return s + "}";
}

RawPost post(std::string id, std::string author, std::string text) {
  RawPost p;
  p.post_id = std::move(id);
  p.author_id = std::move(author);
  p.author_screen_name = "sn_" + p.author_id;
  p.text = std::move(text);
  return p;
}

std::vector<RawPost> synthetic_posts(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RawPost> posts;
  for (std::size_t i = 0; i < n; ++i) {
    RawPost p = post("p" + std::to_string(i), "u" + std::to_string(uniform_index(rng, 12)),
                     "post number " + std::to_string(i) + " says \"hi\"");
    if (uniform01(rng) < 0.3) p.retweeted_author_id = "u" + std::to_string(uniform_index(rng, 15));
    if (uniform01(rng) < 0.2) p.replied_author_id = "u" + std::to_string(uniform_index(rng, 15));
    const auto m = uniform_index(rng, 3);
    for (std::uint64_t j = 0; j < m; ++j) {
      std::string id = "u" + std::to_string(uniform_index(rng, 15));
      if (std::find(p.mentioned_author_ids.begin(), p.mentioned_author_ids.end(), id) ==
          p.mentioned_author_ids.end()) {
        p.mentioned_author_ids.push_back(id);
      }
    }
    if (i % 2) p.timestamp = "2019-10-0" + std::to_string(1 + i % 9) + "T12:00:00Z";
    posts.push_back(std::move(p));
  }
  return posts;
}

}  // namespace

TEST(ParsePosts, EmptyStream) {
  std::istringstream in("");
  auto r = parse_posts(in, PostFormat::jsonl);
  EXPECT_TRUE(r.posts.empty());
  EXPECT_EQ(r.skipped, 0u);
}

TEST(ParsePosts, SkipsMalformedLines) {
  std::ostringstream s;
  s << tweet_line(post("1", "a", "x")) << "\n"
    << tweet_line(post("2", "b", "y")) << "\n"
    << "{not json\n"
    << tweet_line(post("3", "c", "z")) << "\n";
  std::istringstream in(s.str());
  auto r = parse_posts(in, PostFormat::jsonl);
  ASSERT_EQ(r.posts.size(), 3u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(r.posts[0].post_id, "1");
  EXPECT_EQ(r.posts[2].post_id, "3");
}

TEST(ParsePosts, MostlyMalformedIsFormatError) {
  std::istringstream in(tweet_line(post("1", "a", "x")) + "\nbad\nworse\n");
  try {
    parse_posts(in, PostFormat::jsonl);
    FAIL() << "expected a format error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
  }
}

TEST(ParsePosts, HundredPostFixtureMatchesGenerator) {
  const auto expected = synthetic_posts(100, 7);
  std::ostringstream s;
  for (const auto& p : expected) s << tweet_line(p) << "\n";
  std::istringstream in(s.str());
  auto r = parse_posts(in, PostFormat::jsonl);
  ASSERT_EQ(r.posts.size(), 100u);
  EXPECT_EQ(r.skipped, 0u);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(r.posts[i], expected[i]) << "post " << i;
}

TEST(ParsePosts, CsvRoundTrip) {
  const auto expected = synthetic_posts(40, 3);
  std::stringstream s;
  write_posts_csv(s, expected);
  auto r = parse_posts(s, PostFormat::csv);
  ASSERT_EQ(r.posts.size(), expected.size());
  EXPECT_EQ(r.posts, expected);
}

TEST(ParsePosts, DuplicateMentionsCollapsed) {
  std::istringstream in(
      R"({"id":"1","user":{"id_str":"a"},"text":"hi","entities":{"user_mentions":[{"id_str":"b"},{"id_str":"b"},{"id_str":"c"}]}})");
  auto r = parse_posts(in, PostFormat::jsonl);
  ASSERT_EQ(r.posts.size(), 1u);
  EXPECT_EQ(r.posts[0].mentioned_author_ids, (std::vector<std::string>{"b", "c"}));
}

TEST(BuildEdges, RetweetPointsToOriginalAuthor) {
  auto p = post("1", "A", "rt");
  p.retweeted_author_id = "B";
  auto edges = build_edges({p});
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0], (EdgeRecord{"A", "B", EdgeType::retweet, 1}));
}

TEST(BuildEdges, SelfMentionDropped) {
  auto p = post("1", "A", "me");
  p.mentioned_author_ids = {"A"};
  EXPECT_TRUE(build_edges({p}).empty());
}

TEST(BuildEdges, MultiplicityCounted) {
  auto m1 = post("1", "A", "x");
  m1.mentioned_author_ids = {"B"};
  auto m2 = post("2", "A", "y");
  m2.mentioned_author_ids = {"B"};
  auto r = post("3", "A", "z");
  r.replied_author_id = "B";
  auto edges = build_edges({m1, m2, r});
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[0], (EdgeRecord{"A", "B", EdgeType::mention, 2}));
  EXPECT_EQ(edges[1], (EdgeRecord{"A", "B", EdgeType::reply, 1}));
}

TEST(CleanText, AppliesEveryRule) {
  EXPECT_EQ(clean_text("RT @bob Check https://x.co NOW!!", true),
            (std::vector<std::string>{"check", "now"}));
  EXPECT_EQ(clean_text("RT @bob Check https://x.co NOW!!", false),
            (std::vector<std::string>{"@bob", "check", "now"}));
}

TEST(CleanText, Empty) { EXPECT_TRUE(clean_text("", false).empty()); }

TEST(CleanText, KeepsNonLatinScripts) {
  EXPECT_EQ(clean_text("#elxn43 Vote früh 投票", false),
            (std::vector<std::string>{"#elxn43", "vote", "früh", "投票"}));
}

TEST(CleanText, RemovesEmojiSmileysAndUrls) {
  EXPECT_EQ(clean_text("great day 😀😀 :) see www.example.com and t.co/abc via @x", false),
            (std::vector<std::string>{"great", "day", "see", "and", "@x"}));
  EXPECT_EQ(clean_text("I ❤️ this 👍🏽!!", false), (std::vector<std::string>{"i", "this"}));
  EXPECT_EQ(clean_text("ÉCOLE Straße МОСКВА", false),
            (std::vector<std::string>{"école", "straße", "москва"}));
}

TEST(CleanText, PunctuationSplitsTokens) {
  EXPECT_EQ(clean_text("well...done, friends! «quoted» \"x\"", false),
            (std::vector<std::string>{"well", "done", "friends", "quoted", "x"}));
  EXPECT_EQ(clean_text("#a_b @c_d", true), std::vector<std::string>{});
}

TEST(AssembleDataset, RemovesNonAuthorsAndIsolates) {
  auto a = post("1", "A", "hello B");
  a.mentioned_author_ids = {"B", "C"};
  auto b = post("2", "B", "hi A");
  b.replied_author_id = "A";
  auto ds = assemble_dataset({a, b}, build_edges({a, b}));
  ASSERT_EQ(ds.accounts.size(), 2u);
  EXPECT_EQ(ds.accounts[0].account_id, "A");
  EXPECT_EQ(ds.accounts[1].account_id, "B");
  for (const auto& e : ds.edges) {
    EXPECT_NE(e.target, "C");
    EXPECT_NE(e.source, "C");
  }
  EXPECT_EQ(ds.edges.size(), 2u);
}

TEST(AssembleDataset, LoneAuthorIsEmptyDataset) {
  try {
    assemble_dataset({post("1", "A", "alone")}, {});
    FAIL() << "expected dataset error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dataset);
    EXPECT_NE(std::string(e.what()).find("1 authors"), std::string::npos);
  }
}

TEST(AssembleDataset, PhantomMentionsDoNotBecomeNodes) {
  // 40 authors in a ring of mentions; 10% of mentions point at ids that never post.
  std::vector<RawPost> posts;
  Rng rng(11);
  std::size_t phantom = 0;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 5; ++j) {
      auto p = post("p" + std::to_string(i * 5 + j), "a" + std::to_string(i), "text");
      if (uniform01(rng) < 0.1) {
        p.mentioned_author_ids = {"ghost" + std::to_string(phantom++)};
      } else {
        p.mentioned_author_ids = {"a" + std::to_string((i + 1 + j) % 40)};
      }
      posts.push_back(p);
    }
  }
  ASSERT_GT(phantom, 0u);
  auto ds = assemble_dataset(posts, build_edges(posts));
  EXPECT_EQ(ds.accounts.size(), 40u);
  for (const auto& a : ds.accounts) EXPECT_EQ(a.account_id.rfind("a", 0), 0u);
}

TEST(AssembleDataset, Properties) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto posts = synthetic_posts(80, seed);
    const auto edges = build_edges(posts);
    const auto ds = assemble_dataset(posts, edges);

    // Idempotent.
    const auto again = prune_dataset(ds.accounts, ds.edges);
    EXPECT_EQ(again.accounts, ds.accounts);
    EXPECT_EQ(again.edges, ds.edges);

    // Endpoints are retained accounts.
    std::set<std::string> ids;
    for (const auto& a : ds.accounts) {
      ids.insert(a.account_id);
      EXPECT_GE(a.n_posts, 1u);
      EXPECT_GE(a.retweet_fraction, 0.0);
      EXPECT_LE(a.retweet_fraction, 1.0);
    }
    for (const auto& e : ds.edges) {
      EXPECT_TRUE(ids.count(e.source));
      EXPECT_TRUE(ids.count(e.target));
    }

    // Weight sum equals interactions among retained authors, counted directly.
    std::uint64_t direct = 0;
    for (const auto& p : posts) {
      if (!ids.count(p.author_id)) continue;
      auto counts = [&](const std::string& t) { return t != p.author_id && ids.count(t) ? 1u : 0u; };
      if (p.retweeted_author_id) direct += counts(*p.retweeted_author_id);
      if (p.replied_author_id) direct += counts(*p.replied_author_id);
      for (const auto& m : p.mentioned_author_ids) direct += counts(m);
    }
    std::uint64_t total = 0;
    for (const auto& e : ds.edges) total += e.weight;
    EXPECT_EQ(total, direct);
  }
}
