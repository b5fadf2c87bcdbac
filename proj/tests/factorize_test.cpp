#include <gtest/gtest.h>

#include "botmatch/factorize.hpp"
#include "oracles.hpp"
#include "test_graphs.hpp"

using namespace botmatch;

TEST(Factorize, SingleEdgeFitsOne) {
  auto g = fixtures::directed(2, {{0, 1}});
  auto r = graph_factorize(g, {.dim = 2, .lambda = 0.0, .epochs = 200, .seed = 1});
  EXPECT_NEAR(r.space.vectors.row(0).dot(r.space.vectors.row(1)), 1.0, 0.05);
}

TEST(Factorize, EmptyGraphShrinks) {
  auto g = fixtures::directed(5, {});
  RowMatrix init = RowMatrix::Ones(5, 3);
  auto r = graph_factorize(g, {.dim = 3, .lambda = 0.5, .lr = 0.1, .epochs = 10}, init);
  EXPECT_NEAR(r.space.vectors(0, 0), std::pow(1.0 - 0.05, 10), 1e-12);
  EXPECT_LT(r.space.vectors.norm(), init.norm());
}

TEST(Factorize, GradientMatchesFiniteDifferences) {
  auto g = fixtures::random_digraph(10, 0.3, 4);
  auto edges = factor_edges(g, false);
  Rng rng(2);
  RowMatrix y(10, 4);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 0.5 * standard_normal(rng);
  const double lambda = 0.1;
  const RowMatrix grad = gf_gradient(y, edges, lambda);
  for (int trial = 0; trial < 20; ++trial) {
    const auto i = static_cast<Eigen::Index>(uniform_index(rng, 10));
    const auto d = static_cast<Eigen::Index>(uniform_index(rng, 4));
    auto f = [&](const std::vector<double>& x) {
      RowMatrix z = y;
      z(i, d) = x[0];
      return gf_objective(z, edges, lambda);
    };
    const double numeric = oracle::finite_difference(f, {y(i, d)}, 0);
    EXPECT_LT(oracle::relative_error(grad(i, d), numeric), 1e-5);
  }
}

TEST(Factorize, EpochLossRoughlyNonIncreasing) {
  auto g = fixtures::random_digraph(40, 0.1, 7);
  auto r = graph_factorize(g, {.dim = 8, .epochs = 100, .seed = 3});
  for (std::size_t e = 1; e < r.epoch_objective.size(); ++e) {
    EXPECT_LE(r.epoch_objective[e], r.epoch_objective[e - 1] * 1.05);
  }
  EXPECT_LT(r.epoch_objective.back(), r.epoch_objective.front());
}

TEST(Factorize, DeterministicPerSeed) {
  auto g = fixtures::random_digraph(20, 0.2, 1);
  FactorizeOptions opt{.dim = 4, .epochs = 20, .seed = 9};
  EXPECT_EQ(graph_factorize(g, opt).space.vectors, graph_factorize(g, opt).space.vectors);
}

TEST(Factorize, DivergenceIsTrainingError) {
  auto g = fixtures::random_digraph(20, 0.5, 1);
  try {
    graph_factorize(g, {.dim = 8, .lr = 50.0, .epochs = 50, .init_scale = 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::training);
    EXPECT_NE(std::string(e.what()).find("smaller learning rate"), std::string::npos);
  }
}
