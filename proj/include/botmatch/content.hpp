#ifndef BOTMATCH_CONTENT_HPP
#define BOTMATCH_CONTENT_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/linalg.hpp"
#include "botmatch/random.hpp"
#include "botmatch/text.hpp"

namespace botmatch {

/// |a ∩ b| / |a ∪ b| over sorted, duplicate-free term ids; 0 when both are empty.
inline double jaccard_similarity(std::span<const TermId> a, std::span<const TermId> b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

/// Jaccard over the non-zero supports of two document rows.
inline double jaccard_similarity(std::span<const TermEntry> a, std::span<const TermEntry> b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].term == b[j].term) {
      ++common;
      ++i;
      ++j;
    } else if (a[i].term < b[j].term) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

inline double sparse_dot(std::span<const TermEntry> a, std::span<const TermEntry> b) {
  std::size_t i = 0, j = 0;
  double dot = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i].term == b[j].term) {
      dot += a[i].value * b[j].value;
      ++i;
      ++j;
    } else if (a[i].term < b[j].term) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

/// dot / (|a| |b|); 0 if either row is zero.
inline double cosine_similarity(const DocTermMatrix& m, std::size_t i, std::size_t j) {
  const double denom = m.norm(i) * m.norm(j);
  return denom == 0.0 ? 0.0 : sparse_dot(m.row(i), m.row(j)) / denom;
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return (na == 0.0 || nb == 0.0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Hellinger distance between two probability vectors.
inline double hellinger_distance(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return std::sqrt(s / 2.0);
}

/// Maps probability rows to sqrt(p)/sqrt(2) so that euclidean distance in the
/// result equals Hellinger distance in the input.
inline EmbeddingSpace hellinger_space(const EmbeddingSpace& theta) {
  EmbeddingSpace out = theta;
  out.vectors = (theta.vectors.array().max(0.0).sqrt() / std::sqrt(2.0)).matrix();
  out.metric = Metric::euclidean;
  out.name = theta.name + "_hellinger";
  return out;
}

struct LdaOptions {
  int topics = 200;
  double alpha = -1.0;  // negative selects 50 / K
  double beta = 0.01;
  int iters = 500;
  std::uint64_t seed = 0;
};

/// Collapsed Gibbs state. Counts are kept as 32-bit integers.
struct LdaModel {
  int topics = 0;
  std::size_t vocab_size = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<std::int32_t> topic_word;  // K x V, row-major
  std::vector<std::int32_t> doc_topic;   // N x K, row-major
  std::vector<std::int64_t> topic_total;
  std::vector<std::vector<TermId>> words;         // token stream per document
  std::vector<std::vector<std::uint16_t>> assign;  // topic per token
  std::vector<double> sweep_token_counts;          // Σ topic_total after each sweep

  std::size_t n_docs() const { return words.size(); }

  std::int64_t total_tokens() const {
    std::int64_t t = 0;
    for (const auto& w : words) t += static_cast<std::int64_t>(w.size());
    return t;
  }

  /// θ[d][k] = (n_dk + α) / (len_d + Kα)
  RowMatrix theta() const {
    const auto n = static_cast<Eigen::Index>(n_docs());
    RowMatrix th(n, topics);
    for (Eigen::Index d = 0; d < n; ++d) {
      const double len = static_cast<double>(words[static_cast<std::size_t>(d)].size());
      const double denom = len + topics * alpha;
      for (int k = 0; k < topics; ++k) {
        th(d, k) = (doc_topic[static_cast<std::size_t>(d) * topics + k] + alpha) / denom;
      }
    }
    return th;
  }
};

struct LdaFit {
  LdaModel model;
  EmbeddingSpace theta;
};

/// Fits LDA by collapsed Gibbs sampling on a term-frequency matrix.
/// Single-threaded and bit-reproducible for a fixed seed. `on_sweep` (if set)
/// is called after every sweep with the sweep number and the model.
inline LdaFit lda_fit(const DocTermMatrix& dtm, std::span<const std::string> ids,
                      const LdaOptions& opt,
                      const std::function<void(int, const LdaModel&)>& on_sweep = {}) {
  if (dtm.mode() != TermWeighting::tf) {
    fail(ErrorKind::mode, "LDA needs a term-frequency matrix, got " +
                              std::string(to_string(dtm.mode())));
  }
  if (opt.topics < 1) fail(ErrorKind::config, "LDA needs at least one topic");
  if (opt.topics > 65535) fail(ErrorKind::config, "LDA supports at most 65535 topics");
  if (static_cast<std::size_t>(opt.topics) > dtm.cols()) {
    fail(ErrorKind::config, "LDA topics K=" + std::to_string(opt.topics) +
                                " exceed vocabulary size V=" + std::to_string(dtm.cols()));
  }
  if (ids.size() != dtm.rows()) fail(ErrorKind::alignment, "LDA ids do not match matrix rows");
  if (opt.beta <= 0.0) fail(ErrorKind::config, "LDA beta must be positive");

  const int k_topics = opt.topics;
  const std::size_t v_size = dtm.cols();
  LdaModel m;
  m.topics = k_topics;
  m.vocab_size = v_size;
  m.alpha = opt.alpha > 0.0 ? opt.alpha : 50.0 / k_topics;
  m.beta = opt.beta;
  m.topic_word.assign(static_cast<std::size_t>(k_topics) * v_size, 0);
  m.doc_topic.assign(dtm.rows() * static_cast<std::size_t>(k_topics), 0);
  m.topic_total.assign(static_cast<std::size_t>(k_topics), 0);
  m.words.resize(dtm.rows());
  m.assign.resize(dtm.rows());

  for (std::size_t d = 0; d < dtm.rows(); ++d) {
    for (const auto& e : dtm.row(d)) {
      const auto count = static_cast<long>(std::llround(e.value));
      if (count < 0 || std::abs(e.value - static_cast<double>(count)) > 1e-9) {
        fail(ErrorKind::mode, "LDA needs integer term counts");
      }
      m.words[d].insert(m.words[d].end(), static_cast<std::size_t>(count), e.term);
    }
  }

  Rng rng(splitmix64(opt.seed));
  for (std::size_t d = 0; d < m.words.size(); ++d) {
    auto& z = m.assign[d];
    z.resize(m.words[d].size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const auto k = static_cast<std::uint16_t>(uniform_index(rng, static_cast<std::uint64_t>(k_topics)));
      z[i] = k;
      ++m.doc_topic[d * k_topics + k];
      ++m.topic_word[static_cast<std::size_t>(k) * v_size + m.words[d][i]];
      ++m.topic_total[k];
    }
  }

  const std::int64_t expected_tokens = m.total_tokens();
  const double v_beta = static_cast<double>(v_size) * m.beta;
  std::vector<double> cumulative(static_cast<std::size_t>(k_topics));

  for (int sweep = 0; sweep < opt.iters; ++sweep) {
    for (std::size_t d = 0; d < m.words.size(); ++d) {
      std::int32_t* dt = &m.doc_topic[d * k_topics];
      for (std::size_t i = 0; i < m.words[d].size(); ++i) {
        const TermId w = m.words[d][i];
        const std::uint16_t old = m.assign[d][i];
        --dt[old];
        --m.topic_word[static_cast<std::size_t>(old) * v_size + w];
        --m.topic_total[old];

        double total = 0.0;
        for (int k = 0; k < k_topics; ++k) {
          total += (dt[k] + m.alpha) *
                   (m.topic_word[static_cast<std::size_t>(k) * v_size + w] + m.beta) /
                   (static_cast<double>(m.topic_total[k]) + v_beta);
          cumulative[static_cast<std::size_t>(k)] = total;
        }
        const double u = uniform01(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto knew = static_cast<std::uint16_t>(
            std::min<std::ptrdiff_t>(it - cumulative.begin(), k_topics - 1));

        m.assign[d][i] = knew;
        ++dt[knew];
        ++m.topic_word[static_cast<std::size_t>(knew) * v_size + w];
        ++m.topic_total[knew];
      }
    }
    std::int64_t assigned = 0;
    for (auto t : m.topic_total) assigned += t;
    if (assigned != expected_tokens) {
      fail(ErrorKind::training, "LDA token count drifted to " + std::to_string(assigned) +
                                    " (expected " + std::to_string(expected_tokens) + ")");
    }
    m.sweep_token_counts.push_back(static_cast<double>(assigned));
    if (on_sweep) on_sweep(sweep, m);
  }

  EmbeddingSpace theta;
  theta.name = "lda";
  theta.ids.assign(ids.begin(), ids.end());
  theta.vectors = m.theta();
  theta.metric = Metric::cosine;
  theta.kind = SpaceKind::content;
  theta.seed = opt.seed;
  theta.validate();
  return {std::move(m), std::move(theta)};
}

/// Latent semantic analysis: rows of U_D Σ_D from a truncated SVD of the
/// TF-IDF matrix.
inline EmbeddingSpace lsa_fit(const DocTermMatrix& dtm, std::span<const std::string> ids, int dim,
                              const SvdOptions& svd_opt = {}) {
  if (dim < 1 || static_cast<std::size_t>(dim) > std::min(dtm.rows(), dtm.cols())) {
    fail(ErrorKind::config, "LSA dimension " + std::to_string(dim) + " exceeds min(N, V) = " +
                                std::to_string(std::min(dtm.rows(), dtm.cols())));
  }
  if (ids.size() != dtm.rows()) fail(ErrorKind::alignment, "LSA ids do not match matrix rows");
  auto svd = truncated_svd(dtm, dim, svd_opt);
  EmbeddingSpace space;
  space.name = "lsa";
  space.ids.assign(ids.begin(), ids.end());
  space.vectors = svd.u * svd.values.asDiagonal();
  space.metric = Metric::cosine;
  space.kind = SpaceKind::content;
  space.seed = svd_opt.seed;
  space.validate();
  return space;
}

}  // namespace botmatch

#endif  // BOTMATCH_CONTENT_HPP
