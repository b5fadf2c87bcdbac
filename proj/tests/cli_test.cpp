#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "botmatch/cli.hpp"

using namespace botmatch;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "botmatch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct CliTest : ::testing::Test {
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() / ("botmatch_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  void gen(const std::string& name = "ds") {
    auto r = run({"gen", "--out", path(name), "--blocks", "20,20", "--intra", "0.3", "--inter", "0.02",
                  "--doc-len", "50", "--vocab", "20", "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  auto r = run({"query", "--no-such-flag"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({"embed", "--dataset", path("x"), "-P", "novalue"}).code, 1);
  EXPECT_EQ(run({"query", "--threads", "0", "--dataset", path("x")}).code, 1);
}

TEST_F(CliTest, HelpExitsZero) {
  auto r = run({"eval", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--labels"), std::string::npos);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  EXPECT_EQ(run({"query", "--dataset", path("missing"), "--space", "x", "--seeds", "a"}).code, 2);
  gen();
  EXPECT_EQ(run({"query", "--dataset", path("ds"), "--space", "nope", "--seeds", "n0001"}).code, 2);
}

TEST_F(CliTest, NumericErrorsExitThree) {
  gen();
  // alpha far above 1 / lambda_max makes the Katz series diverge.
  auto r = run({"embed", "--dataset", path("ds"), "--model", "hope", "-P", "dim=4", "-P", "alpha=10"});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, UnknownHyperparameterIsUsageError) {
  gen();
  auto r = run({"embed", "--dataset", path("ds"), "--model", "lsa", "-P", "topics=3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("topics"), std::string::npos);
}

TEST_F(CliTest, GenEmbedEvalTable) {
  gen();
  ASSERT_EQ(run({"embed", "--dataset", path("ds"), "--model", "jaccard"}).code, 0);
  auto lda = run({"embed", "--dataset", path("ds"), "--model", "lda", "-P", "topics=4", "-P", "iters=50", "--seed", "2"});
  ASSERT_EQ(lda.code, 0) << lda.err;
  EXPECT_EQ(nlohmann::json::parse(lda.out)["seed"], 2);
  auto r = run({"eval", "--dataset", path("ds"), "--space", "jaccard,lda", "--k", "5,10"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, rule, row1, row2, base;
  std::getline(lines, header);
  std::getline(lines, rule);
  std::getline(lines, row1);
  std::getline(lines, row2);
  std::getline(lines, base);
  EXPECT_EQ(header.rfind("Model", 0), 0u);
  EXPECT_NE(header.find("p@5"), std::string::npos);
  EXPECT_NE(header.find("p@10"), std::string::npos);
  EXPECT_EQ(row1.rfind("jaccard", 0), 0u);
  EXPECT_EQ(row2.rfind("lda", 0), 0u);
  EXPECT_EQ(base.rfind("Random Baseline", 0), 0u);
  // 20 positives among 40 accounts.
  EXPECT_NE(base.find("0.513"), std::string::npos);

  auto j = run({"eval", "--dataset", path("ds"), "--space", "jaccard", "--k", "10", "--format", "json"});
  auto parsed = nlohmann::json::parse(j.out);
  EXPECT_GT(parsed[0]["precision"]["p@10"].get<double>(), 0.9);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  gen();
  const auto cfg = path("embed.conf");
  io::write_file_atomic(cfg, "# lda settings\nmodel = lda\ntopics = 3\niters = 10\nspace = from_config\n");
  auto r = run({"embed", "--config", cfg, "--dataset", path("ds"), "--space", "from_flag"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto meta = nlohmann::json::parse(r.out);
  EXPECT_EQ(meta["name"], "from_flag");
  EXPECT_EQ(meta["params"]["topics"], "3");
  EXPECT_EQ(meta["dim"], 3);
}

TEST_F(CliTest, IngestFromTablesAndPosts) {
  io::write_file_atomic(path("edges.csv"), "source,target,type,weight\na,b,mention,1\nb,c,retweet,2\nc,a,reply,1\n");
  io::write_file_atomic(path("texts.csv"), "node_id,text\na,Hello #world\nb,Hello there @a\nc,#world news\n");
  auto r = run({"ingest", "--edges", path("edges.csv"), "--texts", path("texts.csv"), "--out", path("tbl"),
                "--strip-tags"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ds = load_dataset(path("tbl"));
  EXPECT_EQ(ds.accounts.size(), 3u);
  EXPECT_EQ(ds.accounts[2].clean_text, (std::vector<std::string>{"news"}));

  io::write_file_atomic(path("posts.jsonl"),
                        R"({"id_str":"1","user":{"id_str":"u1","screen_name":"alpha"},"text":"hi @beta","entities":{"user_mentions":[{"id_str":"u2"}]}})"
                        "\n"
                        R"({"id_str":"2","user":{"id_str":"u2","screen_name":"beta"},"text":"yo"})"
                        "\n");
  r = run({"ingest", "--posts", path("posts.jsonl"), "--out", path("posts_ds")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto pds = load_dataset(path("posts_ds"));
  ASSERT_EQ(pds.accounts.size(), 2u);
  EXPECT_EQ(pds.accounts[0].screen_name, "alpha");
  EXPECT_EQ(pds.edges.size(), 1u);
  EXPECT_EQ(run({"ingest", "--posts", path("posts.jsonl"), "--edges", path("edges.csv"), "--out", path("x")}).code, 1);
}

TEST_F(CliTest, QueryExpandProjectOutputs) {
  gen();
  ASSERT_EQ(run({"embed", "--dataset", path("ds"), "--model", "gf", "-P", "dim=4", "-P", "epochs=50"}).code, 0);
  auto q = run({"query", "--dataset", path("ds"), "--space", "gf", "--seeds", "n0000", "--k", "3"});
  ASSERT_EQ(q.code, 0) << q.err;
  EXPECT_EQ(q.out.rfind("rank,account_id,distance\n1,", 0), 0u);
  EXPECT_EQ(std::count(q.out.begin(), q.out.end(), '\n'), 4);

  auto e = run({"expand", "--dataset", path("ds"), "--space", "gf", "--seeds", "n0000", "--k", "3", "--hops", "2",
                "--out", path("expand.csv")});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto csv_text = io::read_file(path("expand.csv"));
  EXPECT_EQ(csv_text.rfind("account_id,hop,parent,score,accepted\n", 0), 0u);
  EXPECT_NE(csv_text.find(",2,"), std::string::npos);

  auto pr = run({"project", "--dataset", path("ds"), "--space", "gf"});
  ASSERT_EQ(pr.code, 0) << pr.err;
  EXPECT_EQ(std::count(pr.out.begin(), pr.out.end(), '\n'), 41);
}

TEST_F(CliTest, RandstringTrainAndScore) {
  auto t = run({"randstring", "train", "--n", "600", "--out", path("model.json")});
  ASSERT_EQ(t.code, 0) << t.err;
  io::write_file_atomic(path("names.txt"), "Xk93mQp0aZ7vB2w\nsunny_baker\n");
  auto s = run({"randstring", "score", "--model", path("model.json"), "--in", path("names.txt")});
  ASSERT_EQ(s.code, 0) << s.err;
  std::istringstream lines(s.out);
  std::string a, b;
  std::getline(lines, a);
  std::getline(lines, b);
  EXPECT_EQ(a.rfind("Xk93mQp0aZ7vB2w,", 0), 0u);
  EXPECT_GT(std::stod(a.substr(a.find(',') + 1)), 0.5);
  EXPECT_LT(std::stod(b.substr(b.find(',') + 1)), 0.5);
  EXPECT_EQ(run({"randstring", "dance"}).code, 1);
}

TEST_F(CliTest, SameArgsSameBytes) {
  gen("a");
  gen("b");
  for (const auto& d : {"a", "b"}) {
    ASSERT_EQ(run({"embed", "--dataset", path(d), "--model", "node2vec", "-P", "dim=8", "-P", "walks=2", "-P", "length=10",
                   "-P", "epochs=1", "--seed", "3"})
                  .code,
              0);
  }
  for (const auto* f : {"edges.csv", "texts.csv", "graph.bmg", "labels.csv", "spaces/node2vec.bme",
                        "spaces/node2vec.meta.json"}) {
    EXPECT_EQ(io::read_file(dir / "a" / f), io::read_file(dir / "b" / f)) << f;
  }
}
