#include <gtest/gtest.h>

#include <random>

#include "moralnet/graph_stats.hpp"
#include "test_support.hpp"

using namespace moralnet;
using moralnet::testing::graph_from_edges;

TEST(ComputeStats, PathGraph) {
  auto g = graph_from_edges({"a", "b", "c", "d"}, {{"a", "b", 1}, {"b", "c", 1}, {"c", "d", 1}});
  auto s = compute_stats(g);
  EXPECT_EQ(s.diameter, 3u);
  EXPECT_DOUBLE_EQ(s.density, 0.5);
  EXPECT_EQ(s.edge_count, 3u);
  EXPECT_EQ(s.max_connectivity, 2u);
  EXPECT_EQ(s.min_connectivity, 1u);
}

TEST(ComputeStats, TriangleWithPendant) {
  auto g = graph_from_edges({"a", "b", "c", "d"}, {{"a", "b", 1}, {"b", "c", 1}, {"a", "c", 1}, {"a", "d", 1}});
  auto s = compute_stats(g);
  // a: 1 closed pair of 3; b, c: 1 of 1; d: degree 1 -> 0.
  EXPECT_NEAR(s.avg_local_clustering, (1.0 / 3 + 1 + 1 + 0) / 4, 1e-15);
  EXPECT_NEAR(s.avg_local_clustering, 0.583333, 1e-6);
}

TEST(ComputeStats, WeightedAverageEdge) {
  auto g = graph_from_edges({"a", "b", "c"}, {{"a", "b", 2}, {"b", "c", 4}});
  auto s = compute_stats(g);
  EXPECT_DOUBLE_EQ(s.weighted_avg_edge, 3.0);
  EXPECT_DOUBLE_EQ(s.weighted_degree_centrality, 12.0 / 3);
}

TEST(ComputeStats, DegenerateGraphs) {
  auto single = compute_stats(graph_from_edges({"a"}, {}));
  EXPECT_EQ(single.diameter, 0u);
  EXPECT_EQ(single.density, 0.0);
  auto empty_edges = compute_stats(graph_from_edges({"a", "b", "c"}, {}));
  EXPECT_EQ(empty_edges.weighted_avg_edge, 0.0);
  EXPECT_EQ(empty_edges.largest_component, 1u);
  EXPECT_THROW(compute_stats(AssociationGraph{}), ValidationError);
}

TEST(ComputeStats, DiameterUsesLargestComponent) {
  // Component {a,b,c,d} is a path of length 3; {e,f} is shorter.
  auto g = graph_from_edges({"a", "b", "c", "d", "e", "f"},
                            {{"a", "b", 1}, {"b", "c", 1}, {"c", "d", 1}, {"e", "f", 1}});
  auto s = compute_stats(g);
  EXPECT_EQ(s.diameter, 3u);
  EXPECT_EQ(s.largest_component, 4u);
  EXPECT_DOUBLE_EQ(s.component_coverage, 4.0 / 6);
}

TEST(ComputeStats, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    const double p = std::uniform_real_distribution<double>(0.02, 0.5)(rng);
    auto dense = moralnet::testing::random_dense(rng, n, p, 9);
    auto s = compute_stats(moralnet::testing::graph_from_dense(dense));
    auto o = moralnet::testing::oracle_stats(dense);
    EXPECT_EQ(s.edge_count, o.edges);
    EXPECT_EQ(s.diameter, o.diameter) << "n=" << n;
    EXPECT_EQ(s.max_connectivity, o.max_deg);
    EXPECT_EQ(s.min_connectivity, o.min_deg);
    EXPECT_NEAR(s.density, o.density, 1e-12);
    EXPECT_NEAR(s.avg_local_clustering, o.clustering, 1e-12);
    EXPECT_NEAR(s.avg_connectivity, o.avg_deg, 1e-12);
    EXPECT_NEAR(s.sd_connectivity, o.sd_deg, 1e-12);
    EXPECT_NEAR(s.weighted_avg_edge, o.wae, 1e-12);
    EXPECT_NEAR(s.weighted_degree_centrality, o.wdc, 1e-12);
  }
}
