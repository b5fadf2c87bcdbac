#ifndef BOTMATCH_FACTORIZE_HPP
#define BOTMATCH_FACTORIZE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/random.hpp"

namespace botmatch {

struct FactorEdge {
  NodeId i;
  NodeId j;
  double value;
};

struct FactorizeOptions {
  int dim = 32;
  double lambda = 0.01;
  double lr = 0.02;
  int epochs = 200;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  bool use_weights = false;  // otherwise every edge has target 1
};

struct FactorizeResult {
  EmbeddingSpace space;
  std::vector<double> epoch_objective;  // objective after each epoch
};

/// Directed edges of the collapsed view with their regression targets.
inline std::vector<FactorEdge> factor_edges(const CommGraph& g, bool use_weights) {
  std::vector<FactorEdge> edges;
  for (NodeId u = 0; u < g.size(); ++u) {
    for (const auto& a : g.collapsed_out(u)) edges.push_back({u, a.node, use_weights ? a.weight : 1.0});
  }
  return edges;
}

/// Σ_{(i,j)∈E} (A_ij − ⟨Y_i, Y_j⟩)² + (λ/2) Σ_i ‖Y_i‖²
inline double gf_objective(const RowMatrix& y, std::span<const FactorEdge> edges, double lambda) {
  double loss = 0.0;
  for (const auto& e : edges) {
    const double r = e.value - y.row(e.i).dot(y.row(e.j));
    loss += r * r;
  }
  return loss + 0.5 * lambda * y.squaredNorm();
}

/// Full analytic gradient of `gf_objective`.
inline RowMatrix gf_gradient(const RowMatrix& y, std::span<const FactorEdge> edges, double lambda) {
  RowMatrix grad = lambda * y;
  for (const auto& e : edges) {
    const double r = e.value - y.row(e.i).dot(y.row(e.j));
    grad.row(e.i) += -2.0 * r * y.row(e.j);
    grad.row(e.j) += -2.0 * r * y.row(e.i);
  }
  return grad;
}

/// SGD on `gf_objective`. Each epoch visits the edges in a seeded shuffled
/// order, stepping both endpoints along the edge term's gradient, then takes
/// one full step on the regularizer. `init` (N x dim) replaces the random
/// initialization when given.
inline FactorizeResult graph_factorize(const CommGraph& g, const FactorizeOptions& opt,
                                       const std::optional<RowMatrix>& init = std::nullopt) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (opt.dim < 1 || opt.dim > n) fail(ErrorKind::config, "factorization needs 1 <= D <= N");
  if (opt.epochs < 0 || !(opt.lr > 0.0) || opt.lambda < 0.0) {
    fail(ErrorKind::config, "invalid factorization options");
  }
  RowMatrix y(n, opt.dim);
  if (init) {
    if (init->rows() != n || init->cols() != opt.dim) {
      fail(ErrorKind::alignment, "initial embedding shape does not match N x D");
    }
    y = *init;
  } else {
    Rng rng = make_stream(opt.seed, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index d = 0; d < opt.dim; ++d) y(i, d) = opt.init_scale * standard_normal(rng);
    }
  }

  auto edges = factor_edges(g, opt.use_weights);
  FactorizeResult result;
  Eigen::RowVectorXd yi, yj;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    Rng rng = make_stream(opt.seed, 1 + static_cast<std::uint64_t>(epoch));
    shuffle(edges.begin(), edges.end(), rng);
    for (const auto& e : edges) {
      yi = y.row(e.i);
      yj = y.row(e.j);
      const double r = e.value - yi.dot(yj);
      y.row(e.i) += opt.lr * 2.0 * r * yj;
      y.row(e.j) += opt.lr * 2.0 * r * yi;
    }
    y *= (1.0 - opt.lr * opt.lambda);
    const double obj = gf_objective(y, edges, opt.lambda);
    if (!std::isfinite(obj) || !y.allFinite()) {
      fail(ErrorKind::training, "graph factorization diverged at epoch " + std::to_string(epoch) +
                                    "; try a smaller learning rate (lr=" + std::to_string(opt.lr) + ")");
    }
    result.epoch_objective.push_back(obj);
  }

  result.space.name = "gf";
  result.space.ids = g.index().ids();
  result.space.vectors = std::move(y);
  result.space.metric = Metric::cosine;
  result.space.kind = SpaceKind::network;
  result.space.seed = opt.seed;
  result.space.validate();
  return result;
}

}  // namespace botmatch

#endif  // BOTMATCH_FACTORIZE_HPP
