#ifndef BOTMATCH_RANDSTRING_HPP
#define BOTMATCH_RANDSTRING_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "botmatch/error.hpp"
#include "botmatch/random.hpp"
#include "botmatch/skipgram.hpp"
#include "botmatch/unicode.hpp"
#include "json.hpp"

namespace botmatch::randstring {

inline constexpr std::size_t kHashWidth = 4096;
inline constexpr std::size_t kFeatureCount = kHashWidth + 4;

struct SparseEntry {
  std::uint32_t index;
  double value;
};
using SparseVector = std::vector<SparseEntry>;

/// Character n-gram (n = 1, 2, 3) frequencies in a signed hash space plus
/// four scalar features. Everything is case-sensitive.
struct NameFeatures {
  std::vector<double> ngrams;  // kHashWidth
  double entropy = 0.0;        // bits, over code-point frequencies
  double length = 0.0;         // code points
  double digit_ratio = 0.0;
  double case_transitions = 0.0;  // lower<->upper switches between adjacent letters

  /// Model input (sparse): non-zero ngram buckets, then entropy / 4,
  /// length / 16, digit_ratio and case_transitions / length at indices
  /// kHashWidth .. kHashWidth + 3.
  SparseVector vector() const {
    SparseVector x;
    for (std::size_t i = 0; i < ngrams.size(); ++i) {
      if (ngrams[i] != 0.0) x.push_back({static_cast<std::uint32_t>(i), ngrams[i]});
    }
    x.push_back({kHashWidth, entropy / 4.0});
    x.push_back({kHashWidth + 1, length / 16.0});
    x.push_back({kHashWidth + 2, digit_ratio});
    x.push_back({kHashWidth + 3, length > 0 ? case_transitions / length : 0.0});
    return x;
  }
};

/// 32-bit FNV-1a over the n-gram's UTF-8 bytes prefixed by its order.
/// Bucket = hash mod 4096, sign = bit 31.
inline std::uint32_t ngram_hash(std::string_view gram, int order) {
  std::uint32_t h = 2166136261u;
  h ^= static_cast<std::uint32_t>(order);
  h *= 16777619u;
  for (unsigned char c : gram) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

inline NameFeatures featurize(std::string_view name) {
  if (name.empty()) fail(ErrorKind::input, "cannot featurize an empty name");
  const std::u32string cps = unicode::decode(name);
  NameFeatures f;
  f.ngrams.assign(kHashWidth, 0.0);
  f.length = static_cast<double>(cps.size());

  std::map<char32_t, std::size_t> freq;
  std::size_t digits = 0;
  for (char32_t c : cps) {
    ++freq[c];
    if (c >= '0' && c <= '9') ++digits;
  }
  for (const auto& [_, count] : freq) {
    const double p = static_cast<double>(count) / f.length;
    f.entropy -= p * std::log2(p);
  }
  f.entropy = std::max(0.0, f.entropy);
  f.digit_ratio = static_cast<double>(digits) / f.length;
  for (std::size_t i = 1; i < cps.size(); ++i) {
    const bool a_up = cps[i - 1] < 0x80 && std::isupper(static_cast<int>(cps[i - 1]));
    const bool a_lo = cps[i - 1] < 0x80 && std::islower(static_cast<int>(cps[i - 1]));
    const bool b_up = cps[i] < 0x80 && std::isupper(static_cast<int>(cps[i]));
    const bool b_lo = cps[i] < 0x80 && std::islower(static_cast<int>(cps[i]));
    if ((a_up && b_lo) || (a_lo && b_up)) f.case_transitions += 1.0;
  }

  std::size_t grams = 0;
  for (int order = 1; order <= 3; ++order) {
    if (cps.size() < static_cast<std::size_t>(order)) break;
    for (std::size_t i = 0; i + order <= cps.size(); ++i) {
      const std::string g = unicode::encode(std::u32string_view(cps).substr(i, static_cast<std::size_t>(order)));
      const std::uint32_t h = ngram_hash(g, order);
      f.ngrams[h % kHashWidth] += (h >> 31) ? -1.0 : 1.0;
      ++grams;
    }
  }
  for (auto& v : f.ngrams) v /= static_cast<double>(grams);
  return f;
}

struct TrainOptions {
  double lr = 0.1;
  int epochs = 10;
  double l2 = 1e-5;
  std::uint64_t seed = 0;
};

struct LogisticModel {
  std::vector<double> weights = std::vector<double>(kFeatureCount, 0.0);
  double bias = 0.0;
  TrainOptions config;
  std::vector<double> epoch_loss;  // mean log loss over the training set after each epoch

  double logit(const SparseVector& x) const {
    double z = bias;
    for (const auto& e : x) z += weights.at(e.index) * e.value;
    return z;
  }
};

/// σ(w·x + b), kept strictly inside (0, 1).
inline double predict(const LogisticModel& model, std::string_view name) {
  if (model.weights.size() != kFeatureCount) fail(ErrorKind::input, "model width does not match name features");
  const double p = sigmoid(model.logit(featurize(name).vector()));
  return std::clamp(p, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

inline double mean_log_loss(const LogisticModel& m, const std::vector<SparseVector>& xs,
                            const std::vector<int>& ys) {
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = m.logit(xs[i]);
    loss -= ys[i] ? log_sigmoid(z) : log_sigmoid(-z);
  }
  return loss / static_cast<double>(xs.size());
}

/// SGD on the L2-regularized log loss from zero weights; each epoch visits
/// the examples in a seeded shuffled order. Label 1 marks a random string.
inline LogisticModel train_features(const std::vector<SparseVector>& xs,
                                    const std::vector<int>& ys, const TrainOptions& opt = {},
                                    std::size_t width = kFeatureCount) {
  if (xs.size() != ys.size() || xs.empty()) fail(ErrorKind::input, "training set is empty or misaligned");
  bool has_pos = false, has_neg = false;
  for (int y : ys) (y ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) fail(ErrorKind::input, "training needs both classes");
  LogisticModel m;
  m.config = opt;
  m.weights.assign(width, 0.0);
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    Rng rng = make_stream(opt.seed, static_cast<std::uint64_t>(epoch));
    shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const auto& x = xs[idx];
      const double err = sigmoid(m.logit(x)) - ys[idx];
      if (opt.l2 != 0.0) {
        const double decay = 1.0 - opt.lr * opt.l2;
        for (auto& w : m.weights) w *= decay;
      }
      for (const auto& e : x) m.weights[e.index] -= opt.lr * err * e.value;
      m.bias -= opt.lr * err;
    }
    const double loss = mean_log_loss(m, xs, ys);
    if (!std::isfinite(loss) || !std::isfinite(m.bias)) {
      fail(ErrorKind::training, "logistic regression diverged; try a smaller learning rate");
    }
    m.epoch_loss.push_back(loss);
  }
  return m;
}

/// Trains on random-string names (`pos`) versus ordinary handles (`neg`).
inline LogisticModel train(const std::vector<std::string>& pos, const std::vector<std::string>& neg,
                           const TrainOptions& opt = {}) {
  if (pos.empty() || neg.empty()) fail(ErrorKind::input, "training needs both classes");
  std::vector<SparseVector> xs;
  std::vector<int> ys;
  xs.reserve(pos.size() + neg.size());
  for (const auto& s : pos) {
    xs.push_back(featurize(s).vector());
    ys.push_back(1);
  }
  for (const auto& s : neg) {
    xs.push_back(featurize(s).vector());
    ys.push_back(0);
  }
  return train_features(xs, ys, opt);
}

inline nlohmann::json to_json(const LogisticModel& m) {
  return {{"weights", m.weights},
          {"bias", m.bias},
          {"config",
           {{"lr", m.config.lr},
            {"epochs", m.config.epochs},
            {"l2", m.config.l2},
            {"seed", m.config.seed},
            {"hash_width", kHashWidth},
            {"ngram_orders", {1, 2, 3}}}}};
}

inline LogisticModel model_from_json(const nlohmann::json& j) {
  LogisticModel m;
  try {
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    const auto& c = j.at("config");
    m.config.lr = c.at("lr").get<double>();
    m.config.epochs = c.at("epochs").get<int>();
    m.config.l2 = c.at("l2").get<double>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, std::string("bad randstring model: ") + e.what());
  }
  if (m.weights.size() != kFeatureCount) fail(ErrorKind::format, "randstring model has wrong width");
  return m;
}

// ---- synthetic benchmark ---------------------------------------------------

/// Uniform 15-character alphanumeric strings.
inline std::vector<std::string> gen_random_names(std::size_t n, std::uint64_t seed,
                                                 std::size_t length = 15) {
  static constexpr std::string_view alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  Rng rng(splitmix64(seed));
  std::vector<std::string> out(n);
  for (auto& s : out) {
    s.resize(length);
    for (auto& c : s) c = alphabet[uniform_index(rng, alphabet.size())];
  }
  return out;
}

inline const std::vector<std::string_view>& handle_words() {
  static const std::vector<std::string_view> words{
      "alpha",  "amber",  "angel",  "apple",  "arrow",  "autumn", "baker",  "bear",   "bella",
      "berry",  "big",    "bird",   "black",  "blue",   "bold",   "books",  "boss",   "brave",
      "bright", "brown",  "buddy",  "candy",  "captain", "cat",   "charlie", "cherry", "chris",
      "city",   "cloud",  "coach",  "cool",   "cosmic", "crazy",  "crystal", "daily", "dan",
      "dark",   "david",  "dawn",   "days",   "dev",    "diva",   "doc",    "dog",    "dragon",
      "dream",  "eagle",  "earth",  "echo",   "emma",   "fan",    "fast",   "film",   "fire",
      "fish",   "fit",    "flash",  "flower", "fox",    "free",   "fresh",  "funny",  "game",
      "garden", "ghost",  "girl",   "gold",   "good",   "green",  "guy",    "happy",  "hawk",
      "hero",   "home",   "honey",  "hope",   "hot",    "ice",    "iron",   "jack",   "james",
      "jazz",   "jen",    "joe",    "john",   "jolly",  "kat",    "kid",    "king",   "kitty",
      "lady",   "lake",   "laura",  "leo",    "life",   "light",  "lily",   "lion",   "little",
      "love",   "lucky",  "luna",   "mad",    "magic",  "maria",  "mark",   "max",    "media",
      "mike",   "mind",   "miss",   "moon",   "music",  "news",   "night",  "nina",   "north",
      "ocean",  "official", "old",  "one",    "owl",    "paul",   "peace",  "pink",   "pixel",
      "place",  "poet",   "power",  "pretty", "prince", "queen",  "quiet",  "rain",   "real",
      "red",    "river",  "rock",   "rose",   "ruby",   "sam",    "sarah",  "sea",    "shadow",
      "silver", "sky",    "smart",  "snow",   "social", "soul",   "south",  "space",  "sport",
      "star",   "steve",  "stone",  "storm",  "sugar",  "summer", "sun",    "super",  "sweet",
      "team",   "tech",   "the",    "tiger",  "time",   "tom",    "top",    "travel", "true",
      "urban",  "viva",   "voice",  "walker", "water",  "west",   "white",  "wild",   "wind",
      "wolf",   "world",  "writer", "yellow", "young",  "zen",    "zone",   "tweets", "daily",
  };
  return words;
}

/// Dictionary-style handles: 1-3 words, optional capitalization, optional
/// underscores between words, and up to 4 trailing digits.
inline std::vector<std::string> gen_handle_names(std::size_t n, std::uint64_t seed) {
  const auto& words = handle_words();
  Rng rng(splitmix64(seed ^ 0xA5A5A5A5ULL));
  std::vector<std::string> out(n);
  for (auto& s : out) {
    const auto n_words = 1 + uniform_index(rng, 3);
    const bool capitalize = uniform01(rng) < 0.4;
    const bool underscores = uniform01(rng) < 0.3;
    for (std::uint64_t w = 0; w < n_words; ++w) {
      std::string word(words[uniform_index(rng, words.size())]);
      if (capitalize) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      if (w && underscores) s.push_back('_');
      s += word;
    }
    const auto n_digits = uniform_index(rng, 5);
    for (std::uint64_t d = 0; d < n_digits; ++d) s.push_back(static_cast<char>('0' + uniform_index(rng, 10)));
    if (s.size() > 15) s.resize(15);
  }
  return out;
}

/// Synthetic benchmark: n random strings and n handles, each split
/// train_frac / (1 - train_frac) after a seeded shuffle.
struct Benchmark {
  std::vector<std::string> train_pos, train_neg, test_pos, test_neg;
};

inline Benchmark make_benchmark(std::size_t n_per_class, std::uint64_t seed, double train_frac = 0.8) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) fail(ErrorKind::config, "train fraction must be in (0, 1)");
  auto pos = gen_random_names(n_per_class, seed);
  auto neg = gen_handle_names(n_per_class, seed + 1);
  Rng rng = make_stream(seed, 0xBE7C);
  shuffle(pos.begin(), pos.end(), rng);
  shuffle(neg.begin(), neg.end(), rng);
  const auto cut = static_cast<std::ptrdiff_t>(static_cast<double>(n_per_class) * train_frac);
  Benchmark b;
  b.train_pos.assign(pos.begin(), pos.begin() + cut);
  b.test_pos.assign(pos.begin() + cut, pos.end());
  b.train_neg.assign(neg.begin(), neg.begin() + cut);
  b.test_neg.assign(neg.begin() + cut, neg.end());
  return b;
}

/// Fraction of names classified correctly at threshold 0.5.
inline double accuracy(const LogisticModel& m, const std::vector<std::string>& pos,
                       const std::vector<std::string>& neg) {
  if (pos.empty() && neg.empty()) fail(ErrorKind::evaluation, "no names to score");
  std::size_t right = 0;
  for (const auto& s : pos) right += predict(m, s) >= 0.5 ? 1 : 0;
  for (const auto& s : neg) right += predict(m, s) < 0.5 ? 1 : 0;
  return static_cast<double>(right) / static_cast<double>(pos.size() + neg.size());
}

}  // namespace botmatch::randstring

#endif  // BOTMATCH_RANDSTRING_HPP
