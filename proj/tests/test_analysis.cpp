#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moralnet/analysis.hpp"
#include "test_support.hpp"

using namespace moralnet;
using moralnet::testing::corpus_of;

namespace {

GlobalMoralNetwork gmn_of(const std::vector<std::pair<std::string, MoralVector>>& rows) {
  GlobalMoralNetwork g;
  for (const auto& [w, v] : rows) {
    g.words.push_back(w);
    g.scores.rows.push_back(v);
    g.is_seed.push_back(false);
  }
  return g;
}

NormLexicon norms(NormKind kind, std::map<std::string, double> entries) {
  NormLexicon lex;
  lex.kind = kind;
  std::tie(lex.scale_min, lex.scale_max) = default_scale(kind);
  lex.entries = std::move(entries);
  return lex;
}

}  // namespace

TEST(DominantDimension, ArgmaxAndTies) {
  EXPECT_EQ(dominant_dimension({0.1, 0.5, 0.2, 0, 0}).label(), "fairness");
  auto tie = dominant_dimension({0.5, 0.5, 0, 0, 0});
  EXPECT_EQ(tie.label(), "care;fairness");
  EXPECT_FALSE(tie.indeterminate);
  EXPECT_TRUE(dominant_dimension({0, 0, 0, 0, 0}).indeterminate);
}

TEST(DominantDimension, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(-3, 3);
  for (int trial = 0; trial < 500; ++trial) {
    MoralVector row, moved;
    for (std::size_t d = 0; d < kDimensions; ++d) {
      row[d] = v(rng);
      moved[d] = std::exp(row[d]) * 2 + 11;
    }
    EXPECT_EQ(dominant_dimension(row).dimensions, dominant_dimension(moved).dimensions);
  }
}

TEST(OverallMorality, MadNormalizedRanking) {
  auto gmn = gmn_of({{"a", {1, 0, 0, 0, 0}},
                     {"b", {1, 1, 0, 0, 0}},
                     {"c", {1, 1, 1, 0, 0}},
                     {"d", {1, 1, 1, 1, 0}},
                     {"e", {20, 20, 20, 20, 20}}});
  auto r = overall_morality(gmn);
  EXPECT_EQ(r.median, 3.0);
  EXPECT_EQ(r.mad, 1.0);
  EXPECT_EQ(r.entries.front().word, "e");
  EXPECT_EQ(r.entries.front().normalized, 97.0);
  EXPECT_EQ(r.find("a")->normalized, -2.0);
  EXPECT_EQ(r.find("a")->rank, 5u);
  EXPECT_EQ(r.top_negative(1).front().word, "a");
  EXPECT_FALSE(r.degenerate);
}

TEST(OverallMorality, ConstantScoresAreDegenerate) {
  auto r = overall_morality(gmn_of({{"a", {1, 0, 0, 0, 0}}, {"b", {0, 1, 0, 0, 0}}}));
  EXPECT_TRUE(r.degenerate);
  for (const auto& e : r.entries) EXPECT_EQ(e.normalized, 0.0);
}

TEST(Divergence, IdenticalRankingsHaveZeroDifferences) {
  auto gmn = gmn_of({{"a", {1, 0, 0, 0, 0}}, {"b", {2, 0, 0, 0, 0}}, {"c", {4, 0, 0, 0, 0}}});
  auto r = overall_morality(gmn);
  auto d = divergence(r, r, 10);
  ASSERT_EQ(d.a_over_b.size(), 3u);
  for (const auto& e : d.a_over_b) EXPECT_EQ(e.difference, 0.0);
}

TEST(Divergence, LargestGapLeads) {
  auto a = overall_morality(gmn_of({{"x", {1, 0, 0, 0, 0}}, {"y", {2, 0, 0, 0, 0}}, {"z", {3, 0, 0, 0, 0}},
                                    {"only_a", {0, 0, 0, 0, 0}}}));
  auto b = overall_morality(gmn_of({{"x", {1, 0, 0, 0, 0}}, {"y", {-3, 0, 0, 0, 0}}, {"z", {3, 0, 0, 0, 0}}}));
  auto d = divergence(a, b, 1);
  ASSERT_EQ(d.a_over_b.size(), 1u);
  EXPECT_EQ(d.a_over_b[0].word, "y");
  EXPECT_GT(d.a_over_b[0].difference, 0.0);
  EXPECT_EQ(d.b_over_a.size(), 1u);
  EXPECT_NE(d.b_over_a[0].word, "only_a");
}

TEST(TopNegative, OrderAndTruncation) {
  auto gmn = gmn_of({{"a", {-1, 0, 0, 0, 0}}, {"b", {-3, 0, 0, 0, 0}}, {"c", {2, 0, 0, 0, 0}}});
  auto s = top_negative(gmn, 0, 2);
  EXPECT_EQ(s.words, (std::vector<std::string>{"b", "a"}));
  EXPECT_FALSE(s.truncated);
  auto all = top_negative(gmn, 0, 10);
  EXPECT_EQ(all.words.size(), 3u);
  EXPECT_TRUE(all.truncated);
}

TEST(LexiconAnalysis, ProportionCountsTypes) {
  auto corpus = corpus_of({{"disgust", {"gross", "spew", "xyzzy"}}});
  auto g = build_graph(corpus, {"disgust"});
  auto a = lexicon_analysis(g, {"disgust"}, norms(NormKind::arousal, {{"gross", 5.0}, {"spew", 6.0}}));
  EXPECT_NEAR(a.concepts[0].proportion, 200.0 / 3.0, 1e-12);
  EXPECT_EQ(a.concepts[0].response_types, 3u);
  EXPECT_EQ(a.concepts[0].in_lexicon, 2u);
}

TEST(LexiconAnalysis, WeightedMeanRenormalizesOverInLexiconMass) {
  // gross 3 of 10, spew 2 of 10: renormalized 0.6 / 0.4.
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  for (int i = 0; i < 3; ++i) rows.push_back({"disgust", {"gross"}});
  for (int i = 0; i < 2; ++i) rows.push_back({"disgust", {"spew"}});
  for (int i = 0; i < 5; ++i) rows.push_back({"disgust", {"xyzzy"}});
  auto g = build_graph(corpus_of(rows), {"disgust"});
  auto a = lexicon_analysis(g, {"disgust"}, norms(NormKind::arousal, {{"gross", 4.0}, {"spew", 6.0}}));
  EXPECT_NEAR(a.concepts[0].weighted_mean, 4.8, 1e-12);
  EXPECT_NEAR(a.mean_weighted(), 4.8, 1e-12);
}

TEST(LexiconAnalysis, ConcretenessThreshold) {
  auto g = build_graph(corpus_of({{"rock", {"stone", "idea"}}}), {"rock"});
  auto a = lexicon_analysis(g, {"rock"}, norms(NormKind::concreteness, {{"stone", 3.6}, {"idea", 2.0}}), 3.5);
  EXPECT_DOUBLE_EQ(a.concepts[0].proportion, 50.0);
}

TEST(LexiconAnalysis, NoInLexiconResponsesIsUndefined) {
  auto g = build_graph(corpus_of({{"rock", {"qq"}}}), {"rock"});
  auto a = lexicon_analysis(g, {"rock"}, norms(NormKind::arousal, {{"stone", 3.0}}));
  EXPECT_TRUE(a.concepts[0].undefined);
  EXPECT_EQ(a.concepts[0].proportion, 0.0);
  EXPECT_TRUE(std::isnan(a.mean_weighted()));
}

TEST(LexiconAnalysis, BoundsOnRandomCorpora) {
  std::mt19937_64 rng(8);
  std::vector<std::string> pool;
  for (int i = 0; i < 30; ++i) pool.push_back(moralnet::testing::node_name(i));
  auto lex = norms(NormKind::arousal, {});
  for (int i = 0; i < 30; i += 2) lex.entries[pool[i]] = 1.0 + static_cast<double>(rng() % 70) / 10.0;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  for (int i = 0; i < 300; ++i) rows.push_back({pool[rng() % 5], {pool[rng() % 30], pool[rng() % 30]}});
  auto g = build_graph(corpus_of(rows), {pool.begin(), pool.begin() + 5});
  auto a = lexicon_analysis(g, {pool.begin(), pool.begin() + 5}, lex);
  for (const auto& c : a.concepts) {
    EXPECT_GE(c.proportion, 0.0);
    EXPECT_LE(c.proportion, 100.0);
    if (!c.undefined) {
      EXPECT_GE(c.weighted_mean, lex.scale_min);
      EXPECT_LE(c.weighted_mean, lex.scale_max);
    }
  }
}

TEST(CompareLexicon, FlagsPlantedDifference) {
  // Graph a's concepts answer with high-arousal words, graph b's with low.
  std::vector<std::pair<std::string, std::vector<std::string>>> ra, rb;
  std::vector<std::string> concepts;
  std::mt19937_64 rng(12);
  auto lex = norms(NormKind::arousal, {{"hot", 7.5}, {"wild", 7.0}, {"loud", 6.8}, {"calm", 1.5}, {"dull", 2.0}, {"flat", 1.8}});
  const std::vector<std::string> high{"hot", "wild", "loud"}, low{"calm", "dull", "flat"};
  for (int c = 0; c < 20; ++c) {
    std::string cue = "c" + std::to_string(c);
    concepts.push_back(cue);
    for (int t = 0; t < 6; ++t) {
      ra.push_back({cue, {high[rng() % 3], low[rng() % 3 == 0 ? 0 : 1]}});
      rb.push_back({cue, {low[rng() % 3], high[rng() % 4 == 0 ? 0 : 1]}});
    }
  }
  auto ga = build_graph(corpus_of(ra), concepts);
  auto gb = build_graph(corpus_of(rb), concepts);
  auto cmp = compare_lexicon("care", ga, gb, concepts, lex, std::nullopt);
  EXPECT_GT(cmp.a_weighted, cmp.b_weighted);
  EXPECT_TRUE(cmp.weighted_test.significant);
  auto rep = to_report(std::vector<LexiconComparison>{cmp});
  EXPECT_EQ(rep.rows.size(), 1u);
}

TEST(DimensionSubgraphs, PlantedNegativeCliqueIsDensest) {
  std::mt19937_64 rng(21);
  const std::size_t n = 60;
  auto dense = moralnet::testing::random_dense(rng, n, 0.03);
  moralnet::testing::connect(rng, dense);
  std::vector<std::size_t> clique{3, 9, 17, 28, 40, 51};
  for (auto i : clique)
    for (auto j : clique)
      if (i != j) dense[i][j] = 3;
  auto g = moralnet::testing::graph_from_dense(dense);
  GlobalMoralNetwork gmn;
  gmn.words = g.nodes;
  gmn.scores.rows.assign(n, MoralVector{});
  gmn.is_seed.assign(n, false);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& row : gmn.scores.rows)
    for (auto& v : row) v = u(rng);
  for (auto i : clique) gmn.scores.rows[i][2] = -5;  // loyalty
  auto dims = compare_dimension_subgraphs(gmn, g, clique.size());
  ASSERT_EQ(dims.size(), kDimensions);
  EXPECT_DOUBLE_EQ(dims[2].pruned.density, 1.0);
  for (std::size_t d = 0; d < kDimensions; ++d) {
    if (d != 2) {
      EXPECT_GT(dims[2].pruned.density, dims[d].pruned.density);
    }
    EXPECT_LE(dims[d].pruned.node_count, dims[d].non_pruned.node_count);
  }
}

TEST(DimensionSubgraphs, FullVocabularyMatchesGlobalStats) {
  std::mt19937_64 rng(22);
  auto dense = moralnet::testing::random_dense(rng, 30, 0.1);
  auto g = moralnet::testing::graph_from_dense(dense);
  GlobalMoralNetwork gmn;
  gmn.words = g.nodes;
  gmn.scores.rows.assign(30, MoralVector{});
  gmn.is_seed.assign(30, false);
  auto dims = compare_dimension_subgraphs(gmn, g, 30);
  auto global = compute_stats(g);
  for (const auto& ds : dims) {
    EXPECT_FALSE(ds.truncated);
    EXPECT_EQ(ds.pruned.node_count, global.node_count);
    EXPECT_EQ(ds.pruned.edge_count, global.edge_count);
    EXPECT_EQ(ds.pruned.diameter, global.diameter);
    EXPECT_DOUBLE_EQ(ds.pruned.density, global.density);
    EXPECT_DOUBLE_EQ(ds.pruned.avg_local_clustering, global.avg_local_clustering);
    EXPECT_DOUBLE_EQ(ds.pruned.weighted_degree_centrality, global.weighted_degree_centrality);
  }
  auto more = compare_dimension_subgraphs(gmn, g, 31);
  EXPECT_TRUE(more.front().truncated);
}

TEST(DimensionSubgraphs, NoSharedWordsRejected) {
  auto g = moralnet::testing::graph_from_edges({"a", "b"}, {{"a", "b", 1}});
  EXPECT_THROW(compare_dimension_subgraphs(gmn_of({{"zzz", {}}}), g, 5), ValidationError);
}
