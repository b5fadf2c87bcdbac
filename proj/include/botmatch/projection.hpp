#ifndef BOTMATCH_PROJECTION_HPP
#define BOTMATCH_PROJECTION_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "botmatch/csv.hpp"
#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/linalg.hpp"
#include "botmatch/random.hpp"

namespace botmatch {

enum class ProjectionMethod { pca, tsne };

struct TsneOptions {
  double perplexity = 30.0;
  int iters = 1000;
  int exaggeration_iters = 250;
  double exaggeration = 12.0;
  double learning_rate = 200.0;
  std::uint64_t seed = 0;
  double entropy_tol = 1e-5;
  std::size_t max_points = 5000;
};

struct TsneAffinities {
  Eigen::MatrixXd conditional;  // row i: p_{j|i}, rows sum to 1
  Eigen::MatrixXd joint;        // (P + Pᵀ) / 2N, sums to 1
  std::vector<double> entropy;  // natural-log entropy of each conditional row
  std::vector<double> beta;     // precision 1 / (2σ²) per point
};

namespace detail {

inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd sq = x.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * x * x.transpose()).colwise() + sq;
  d.rowwise() += sq.transpose();
  return d.cwiseMax(0.0);
}

}  // namespace detail

/// Per-point binary search on the Gaussian precision so that each
/// conditional distribution has entropy log(perplexity).
inline TsneAffinities tsne_affinities(const Eigen::MatrixXd& x, const TsneOptions& opt) {
  const Eigen::Index n = x.rows();
  if (!(opt.perplexity >= 1.0) || opt.perplexity * 3.0 >= static_cast<double>(n)) {
    fail(ErrorKind::config, "perplexity " + std::to_string(opt.perplexity) +
                                " is infeasible for " + std::to_string(n) + " points (needs perplexity < N/3)");
  }
  const Eigen::MatrixXd d = detail::squared_distances(x);
  const double target = std::log(opt.perplexity);
  TsneAffinities a;
  a.conditional = Eigen::MatrixXd::Zero(n, n);
  a.entropy.resize(static_cast<std::size_t>(n));
  a.beta.resize(static_cast<std::size_t>(n));
  Eigen::VectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double h = 0.0;
    // Distances shifted by the nearest neighbor keep exp() in range.
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, d(i, j));
    }
    for (int it = 0; it < 200; ++it) {
      double sum = 0.0, dot = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
          row(j) = 0.0;
          continue;
        }
        const double shifted = d(i, j) - dmin;
        row(j) = std::exp(-beta * shifted);
        sum += row(j);
        dot += row(j) * shifted;
      }
      // H = log Σ + β <d>, with the shift cancelling out.
      h = std::log(sum) + beta * dot / sum;
      row /= sum;
      const double diff = h - target;
      if (std::abs(diff) < opt.entropy_tol) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
    a.conditional.row(i) = row.transpose();
    a.entropy[static_cast<std::size_t>(i)] = h;
    a.beta[static_cast<std::size_t>(i)] = beta;
  }
  a.joint = (a.conditional + a.conditional.transpose()) / (2.0 * static_cast<double>(n));
  return a;
}

/// Exact t-SNE (O(N²) per iteration) with PCA initialization.
inline Eigen::MatrixXd tsne(const Eigen::MatrixXd& x, const TsneOptions& opt = {}) {
  const Eigen::Index n = x.rows();
  if (static_cast<std::size_t>(n) > opt.max_points) {
    fail(ErrorKind::size, "exact t-SNE supports at most " + std::to_string(opt.max_points) + " points");
  }
  const auto aff = tsne_affinities(x, opt);
  const Eigen::MatrixXd p = aff.joint.cwiseMax(1e-12);

  Eigen::MatrixXd y(n, 2);
  {
    const Eigen::Index k = std::min<Eigen::Index>(2, x.cols());
    auto init = pca(x, k).scores;
    y.setZero();
    y.leftCols(k) = init;
    const double sd = std::sqrt(y.col(0).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(n, 1)));
    y *= sd > 0.0 ? 1e-4 / sd : 1.0;
    Rng rng(splitmix64(opt.seed));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) y(i, c) += 1e-6 * standard_normal(rng);
    }
  }

  Eigen::MatrixXd update = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
  Eigen::MatrixXd num(n, n);
  Eigen::MatrixXd grad(n, 2);
  for (int it = 0; it < opt.iters; ++it) {
    const double exag = it < opt.exaggeration_iters ? opt.exaggeration : 1.0;
    const double momentum = it < opt.exaggeration_iters ? 0.5 : 0.8;
    num = (1.0 + detail::squared_distances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    const double z = num.sum();
    grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double w = (exag * p(i, j) - num(i, j) / z) * num(i, j);
        grad(i, 0) += w * (y(i, 0) - y(j, 0));
        grad(i, 1) += w * (y(i, 1) - y(j, 1));
      }
    }
    grad *= 4.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        const bool same = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
        gains(i, c) = same ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
        update(i, c) = momentum * update(i, c) - opt.learning_rate * gains(i, c) * grad(i, c);
      }
    }
    y += update;
    y.rowwise() -= y.colwise().mean();
  }
  if (!y.allFinite()) fail(ErrorKind::training, "t-SNE produced non-finite coordinates");
  return y;
}

/// N x 2 projection of a space. Cosine spaces are row-normalized first.
inline Eigen::MatrixXd project_2d(const EmbeddingSpace& space, ProjectionMethod method,
                                  const TsneOptions& opt = {}) {
  Eigen::MatrixXd x = space.metric == Metric::cosine && space.kind != SpaceKind::ranked
                          ? Eigen::MatrixXd(normalize_rows(space.vectors))
                          : Eigen::MatrixXd(space.vectors);
  if (method == ProjectionMethod::tsne) return tsne(x, opt);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), 2);
  const Eigen::Index k = std::min<Eigen::Index>(2, x.cols());
  out.leftCols(k) = pca(x, k).scores;
  return out;
}

/// "account_id,x,y,label" rows.
inline void write_projection_csv(std::ostream& out, const std::vector<std::string>& ids,
                                 const Eigen::MatrixXd& xy, const std::vector<std::string>& labels) {
  csv::write_row(out, {"account_id", "x", "y", "label"});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    csv::write_row(out, {ids[i], format_g9(xy(r, 0)), format_g9(xy(r, 1)),
                         i < labels.size() ? labels[i] : std::string()});
  }
}

}  // namespace botmatch

#endif  // BOTMATCH_PROJECTION_HPP
