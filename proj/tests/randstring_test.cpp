#include <gtest/gtest.h>

#include "botmatch/eval.hpp"
#include "botmatch/randstring.hpp"

using namespace botmatch;
using namespace botmatch::randstring;

TEST(Featurize, ConstantStringHasZeroEntropy) { EXPECT_EQ(featurize("aaaaa").entropy, 0.0); }

TEST(Featurize, TwoSymbolsOneBit) { EXPECT_DOUBLE_EQ(featurize("ab").entropy, 1.0); }

TEST(Featurize, EmptyIsInputError) {
  try {
    featurize("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
  }
}

TEST(Featurize, RandomStringsHaveHigherEntropy) {
  auto random = gen_random_names(1000, 1);
  auto handles = gen_handle_names(1000, 1);
  double er = 0, eh = 0;
  for (const auto& s : random) er += featurize(s).entropy;
  for (const auto& s : handles) eh += featurize(s).entropy;
  EXPECT_GT(er / 1000, eh / 1000);
}

TEST(Featurize, Invariants) {
  for (const auto& s : {std::string("gG6RKc6QBqOLKyU"), std::string("Blue_Sky_1990"), std::string("x"),
                        std::string("Ünïcödé")}) {
    auto f = featurize(s);
    EXPECT_GE(f.digit_ratio, 0.0);
    EXPECT_LE(f.digit_ratio, 1.0);
    EXPECT_GE(f.entropy, 0.0);
    EXPECT_LE(f.entropy, std::log2(f.length) + 1e-12);
    EXPECT_EQ(f.ngrams.size(), kHashWidth);
    for (double v : f.ngrams) EXPECT_TRUE(std::isfinite(v));
  }
  auto f = featurize("aB3cD");
  EXPECT_DOUBLE_EQ(f.digit_ratio, 0.2);
  EXPECT_EQ(f.length, 5.0);
  EXPECT_EQ(featurize("AbC").case_transitions, 2.0);
  EXPECT_NE(featurize("abc").vector().size(), 0u);
}

TEST(Featurize, Deterministic) {
  auto a = featurize("someHandle42"), b = featurize("someHandle42");
  EXPECT_EQ(a.ngrams, b.ngrams);
  EXPECT_EQ(ngram_hash("ab", 2), ngram_hash("ab", 2));
  EXPECT_NE(ngram_hash("ab", 2), ngram_hash("ab", 3));
}

TEST(Train, SeparableToySet) {
  std::vector<SparseVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back({{0, i < 10 ? -1.0 - i * 0.1 : 1.0 + i * 0.1}});
    ys.push_back(i < 10 ? 0 : 1);
  }
  auto m = train_features(xs, ys, {.lr = 0.5, .epochs = 20, .l2 = 0.0}, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(sigmoid(m.logit(xs[i])) > 0.5, ys[i] == 1);
}

TEST(Train, LabelFlipNegatesWeights) {
  auto pos = gen_random_names(200, 3);
  auto neg = gen_handle_names(200, 3);
  std::vector<SparseVector> xs;
  std::vector<int> ys, flipped;
  for (std::size_t i = 0; i < 200; ++i) {
    xs.push_back(featurize(pos[i]).vector());
    ys.push_back(1);
    xs.push_back(featurize(neg[i]).vector());
    ys.push_back(0);
  }
  for (int y : ys) flipped.push_back(1 - y);
  TrainOptions opt{.epochs = 5, .seed = 9};
  auto a = train_features(xs, ys, opt), b = train_features(xs, flipped, opt);
  double norm = 0;
  for (std::size_t i = 0; i < a.weights.size(); ++i) norm += std::pow(a.weights[i] + b.weights[i], 2);
  EXPECT_LT(std::sqrt(norm), 1e-3);
  EXPECT_NEAR(a.bias + b.bias, 0.0, 1e-9);
}

TEST(Train, LossDecreasesAndReproducible) {
  auto pos = gen_random_names(300, 5);
  auto neg = gen_handle_names(300, 5);
  TrainOptions opt{.epochs = 5, .seed = 1};
  auto m = train(pos, neg, opt);
  ASSERT_EQ(m.epoch_loss.size(), 5u);
  EXPECT_LT(m.epoch_loss.front(), std::log(2.0));
  for (std::size_t i = 1; i < 5; ++i) EXPECT_LT(m.epoch_loss[i], m.epoch_loss[i - 1]);
  auto again = train(pos, neg, opt);
  EXPECT_EQ(m.weights, again.weights);
  EXPECT_EQ(m.bias, again.bias);
}

TEST(Train, EmptyClassRejected) {
  EXPECT_THROW(train({}, {"abc"}), Error);
}

TEST(Predict, ZeroModelIsHalf) {
  LogisticModel m;
  EXPECT_EQ(predict(m, "anything"), 0.5);
  EXPECT_EQ(predict(m, "gG6RKc6QBqOLKyU"), 0.5);
}

TEST(Predict, BiasMonotone) {
  auto m = train(gen_random_names(100, 2), gen_handle_names(100, 2), {.epochs = 3});
  auto shifted = m;
  shifted.bias += 1.0;
  for (const auto& s : {"abc", "Q8xZ0pLm2Vb7nRt", "happy_days_2020"}) {
    const double p = predict(m, s);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    EXPECT_GT(predict(shifted, s), p);
  }
}

TEST(Predict, StrictlyInsideUnitInterval) {
  LogisticModel m;
  m.bias = 1e6;
  EXPECT_LT(predict(m, "a"), 1.0);
  m.bias = -1e6;
  EXPECT_GT(predict(m, "a"), 0.0);
}

TEST(Predict, HeldOutAuc) {
  auto pos = gen_random_names(2000, 11), neg = gen_handle_names(2000, 11);
  auto m = train({pos.begin(), pos.begin() + 1600}, {neg.begin(), neg.begin() + 1600}, {.seed = 2});
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 1600; i < 2000; ++i) {
    scores.push_back(predict(m, pos[i]));
    labels.push_back(1);
    scores.push_back(predict(m, neg[i]));
    labels.push_back(0);
  }
  EXPECT_GE(roc_auc(scores, labels), 0.98);
}

TEST(Model, JsonRoundTrip) {
  auto m = train(gen_random_names(50, 1), gen_handle_names(50, 1), {.epochs = 2, .seed = 4});
  auto back = model_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.config.seed, 4u);
  EXPECT_THROW(model_from_json(nlohmann::json{{"weights", {1.0}}}), Error);
}
