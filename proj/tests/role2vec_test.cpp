#include <gtest/gtest.h>

#include "botmatch/node2vec.hpp"
#include "test_graphs.hpp"

using namespace botmatch;

namespace {

Role2VecOptions small_options() {
  Role2VecOptions o;
  o.walks = {.walks_per_node = 2, .walk_length = 10, .seed = 1};
  o.skipgram = {.dim = 4, .window = 3, .epochs = 1, .seed = 1};
  return o;
}

}  // namespace

TEST(Role2Vec, RegularGraphHasOneRole) {
  // 8-cycle is 2-regular.
  std::vector<std::pair<std::size_t, std::size_t>> ring;
  for (std::size_t i = 0; i < 8; ++i) ring.emplace_back(i, (i + 1) % 8);
  auto r = role2vec_embed(fixtures::undirected(8, ring), small_options());
  EXPECT_EQ(r.role_count, 1u);
  for (Eigen::Index i = 1; i < 8; ++i) EXPECT_EQ(r.space.vectors.row(i), r.space.vectors.row(0));
}

TEST(Role2Vec, StarHasTwoRoles) {
  auto r = role2vec_embed(fixtures::undirected(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}), small_options());
  EXPECT_EQ(r.role_count, 2u);
  EXPECT_NE(r.roles[0], r.roles[1]);
  for (int i = 2; i < 6; ++i) EXPECT_EQ(r.roles[i], r.roles[1]);
}

TEST(Role2Vec, IsomorphicComponentsShareRoles) {
  // Component 1 on 0..4 (a path with a pendant), component 2 is its image
  // under the map below.
  const std::vector<std::pair<std::size_t, std::size_t>> base{{0, 1}, {1, 2}, {2, 3}, {1, 4}};
  const std::vector<std::size_t> iso{7, 5, 9, 6, 8};  // node i -> iso[i]
  auto pairs = base;
  for (auto [a, b] : base) pairs.emplace_back(iso[a], iso[b]);
  auto g = fixtures::undirected(10, pairs);
  auto roles = wl_roles(g, 2, 1u << 14);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(roles[i], roles[iso[i]]) << i;
  auto r = role2vec_embed(g, small_options());
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.space.vectors.row(static_cast<Eigen::Index>(i)),
              r.space.vectors.row(static_cast<Eigen::Index>(iso[i])));
  }
}

TEST(Role2Vec, InitialLabelsAreLogDegreeBins) {
  auto g = fixtures::undirected(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  auto roles = wl_roles(g, 0, 1u << 14);
  EXPECT_EQ(roles[0], 2u);  // floor(log2(6))
  EXPECT_EQ(roles[1], 1u);  // floor(log2(2))
}

TEST(Role2Vec, NegativeIterationsRejected) { EXPECT_THROW(wl_roles(fixtures::undirected(2, {{0, 1}}), -1, 16), Error); }
