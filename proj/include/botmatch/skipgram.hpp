#ifndef BOTMATCH_SKIPGRAM_HPP
#define BOTMATCH_SKIPGRAM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/random.hpp"

namespace botmatch {

using Token = std::uint32_t;

struct SkipGramOptions {
  int dim = 64;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;  // decays linearly to lr * 1e-4
  std::uint64_t seed = 0;
};

struct SkipGramModel {
  RowMatrix input;   // vocab x dim, the embedding
  RowMatrix output;  // vocab x dim, context vectors
  std::vector<double> epoch_loss;  // mean pair loss per epoch
};

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log σ(x) without overflow
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

namespace detail {

// Pair loss L = −log σ(u·v_0) − Σ_{r>=1} log σ(−u·v_r), where v_0 is the
// context row and v_1.. are negatives. Writes dL/du into grad_u and dL/dv_r
// into grad_v (row r at grad_v + r*dim), all evaluated at the current values.
inline double pair_gradient(const double* u, std::span<const double* const> v, int dim,
                            double* grad_u, double* grad_v) {
  std::fill(grad_u, grad_u + dim, 0.0);
  double loss = 0.0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    const double* vr = v[r];
    double dot = 0.0;
    for (int d = 0; d < dim; ++d) dot += u[d] * vr[d];
    // positive: dL/d(dot) = σ(dot) − 1; negative: dL/d(dot) = σ(dot)
    const double coeff = r == 0 ? sigmoid(dot) - 1.0 : sigmoid(dot);
    loss -= r == 0 ? log_sigmoid(dot) : log_sigmoid(-dot);
    double* gv = grad_v + r * static_cast<std::size_t>(dim);
    for (int d = 0; d < dim; ++d) {
      grad_u[d] += coeff * vr[d];
      gv[d] = coeff * u[d];
    }
  }
  return loss;
}

// Cumulative unigram^0.75 table for negative sampling.
inline std::vector<double> noise_cdf(std::span<const std::vector<Token>> sequences,
                                     std::size_t vocab_size) {
  std::vector<double> freq(vocab_size, 0.0);
  for (const auto& s : sequences) {
    for (Token t : s) freq[t] += 1.0;
  }
  std::vector<double> cdf(vocab_size, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    total += std::pow(freq[i], 0.75);
    cdf[i] = total;
  }
  return cdf;
}

}  // namespace detail

/// Loss of one (center, context) pair with the given negatives.
inline double skipgram_pair_loss(const RowMatrix& input, const RowMatrix& output, Token center,
                                 Token context, std::span<const Token> negatives) {
  const int dim = static_cast<int>(input.cols());
  std::vector<const double*> rows{output.row(context).data()};
  for (Token n : negatives) rows.push_back(output.row(n).data());
  std::vector<double> gu(static_cast<std::size_t>(dim)), gv(rows.size() * static_cast<std::size_t>(dim));
  return detail::pair_gradient(input.row(center).data(), rows, dim, gu.data(), gv.data());
}

/// Analytic gradient of `skipgram_pair_loss` with respect to both matrices.
inline std::pair<RowMatrix, RowMatrix> skipgram_pair_gradient(const RowMatrix& input,
                                                              const RowMatrix& output, Token center,
                                                              Token context,
                                                              std::span<const Token> negatives) {
  const int dim = static_cast<int>(input.cols());
  std::vector<Token> targets{context};
  targets.insert(targets.end(), negatives.begin(), negatives.end());
  std::vector<const double*> rows;
  for (Token t : targets) rows.push_back(output.row(t).data());
  std::vector<double> gu(static_cast<std::size_t>(dim)), gv(rows.size() * static_cast<std::size_t>(dim));
  detail::pair_gradient(input.row(center).data(), rows, dim, gu.data(), gv.data());
  RowMatrix d_in = RowMatrix::Zero(input.rows(), input.cols());
  RowMatrix d_out = RowMatrix::Zero(output.rows(), output.cols());
  for (int d = 0; d < dim; ++d) d_in(center, d) = gu[static_cast<std::size_t>(d)];
  for (std::size_t r = 0; r < targets.size(); ++r) {
    for (int d = 0; d < dim; ++d) d_out(targets[r], d) += gv[r * dim + static_cast<std::size_t>(d)];
  }
  return {std::move(d_in), std::move(d_out)};
}

/// Skip-gram with negative sampling over token sequences. Every (center,
/// context) pair within `window` positions contributes one SGD step that
/// moves all touched rows by −lr times the gradient evaluated before the step.
/// Negatives are drawn from unigram^0.75; a negative equal to the context is
/// redrawn once and otherwise skipped. Single-threaded and deterministic.
inline SkipGramModel skipgram_train(std::span<const std::vector<Token>> sequences,
                                    std::size_t vocab_size, const SkipGramOptions& opt,
                                    const std::function<void(int, const SkipGramModel&)>& on_epoch = {}) {
  if (opt.dim < 1 || opt.window < 1 || opt.negatives < 0 || opt.epochs < 0 || !(opt.lr > 0.0)) {
    fail(ErrorKind::config, "invalid skip-gram options");
  }
  if (vocab_size == 0) fail(ErrorKind::config, "skip-gram needs a nonempty vocabulary");
  const int dim = opt.dim;
  SkipGramModel model;
  model.input.resize(static_cast<Eigen::Index>(vocab_size), dim);
  model.output = RowMatrix::Zero(static_cast<Eigen::Index>(vocab_size), dim);
  Rng init_rng = make_stream(opt.seed, 0);
  for (Eigen::Index i = 0; i < model.input.rows(); ++i) {
    for (int d = 0; d < dim; ++d) model.input(i, d) = (uniform01(init_rng) - 0.5) / dim;
  }

  std::size_t pairs_per_epoch = 0;
  for (const auto& s : sequences) {
    const auto len = static_cast<std::ptrdiff_t>(s.size());
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      const auto lo = std::max<std::ptrdiff_t>(0, i - opt.window);
      const auto hi = std::min<std::ptrdiff_t>(len - 1, i + opt.window);
      pairs_per_epoch += static_cast<std::size_t>(hi - lo);
    }
  }
  const auto cdf = detail::noise_cdf(sequences, vocab_size);
  const double noise_total = cdf.empty() ? 0.0 : cdf.back();
  auto draw_noise = [&](Rng& rng) -> Token {
    const double u = uniform01(rng) * noise_total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<Token>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                      static_cast<std::ptrdiff_t>(vocab_size) - 1));
  };

  const double total_pairs = static_cast<double>(pairs_per_epoch) * opt.epochs;
  double processed = 0.0;
  std::vector<const double*> rows;
  std::vector<Token> targets;
  std::vector<double> grad_u(static_cast<std::size_t>(dim));
  std::vector<double> grad_v(static_cast<std::size_t>(dim) * (1 + static_cast<std::size_t>(opt.negatives)));

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    Rng rng = make_stream(opt.seed, 1 + static_cast<std::uint64_t>(epoch));
    double epoch_loss = 0.0;
    for (const auto& s : sequences) {
      const auto len = static_cast<std::ptrdiff_t>(s.size());
      for (std::ptrdiff_t i = 0; i < len; ++i) {
        const auto lo = std::max<std::ptrdiff_t>(0, i - opt.window);
        const auto hi = std::min<std::ptrdiff_t>(len - 1, i + opt.window);
        const Token center = s[static_cast<std::size_t>(i)];
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const Token context = s[static_cast<std::size_t>(j)];
          targets.assign(1, context);
          for (int n = 0; n < opt.negatives && noise_total > 0.0; ++n) {
            Token neg = draw_noise(rng);
            if (neg == context) neg = draw_noise(rng);
            if (neg != context) targets.push_back(neg);
          }
          rows.clear();
          for (Token t : targets) rows.push_back(model.output.row(t).data());
          double* u = model.input.row(center).data();
          epoch_loss += detail::pair_gradient(u, rows, dim, grad_u.data(), grad_v.data());

          const double lr = opt.lr * std::max(1e-4, 1.0 - processed / total_pairs);
          processed += 1.0;
          for (int d = 0; d < dim; ++d) u[d] -= lr * grad_u[static_cast<std::size_t>(d)];
          for (std::size_t r = 0; r < targets.size(); ++r) {
            double* v = model.output.row(targets[r]).data();
            const double* g = grad_v.data() + r * static_cast<std::size_t>(dim);
            for (int d = 0; d < dim; ++d) v[d] -= lr * g[d];
          }
        }
      }
    }
    model.epoch_loss.push_back(pairs_per_epoch ? epoch_loss / static_cast<double>(pairs_per_epoch) : 0.0);
    if (!model.input.allFinite()) {
      fail(ErrorKind::training, "skip-gram diverged; try a smaller learning rate");
    }
    if (on_epoch) on_epoch(epoch, model);
  }
  return model;
}

}  // namespace botmatch

#endif  // BOTMATCH_SKIPGRAM_HPP
