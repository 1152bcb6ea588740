#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "moralnet/data_io.hpp"
#include "moralnet/graph.hpp"
#include "moralnet/graph_stats.hpp"
#include "moralnet/propagation.hpp"
#include "moralnet/report.hpp"
#include "moralnet/statistics.hpp"

namespace moralnet {

// ---------------------------------------------------------------------------
// Dominant dimension

struct DominantDimension {
  std::vector<std::size_t> dimensions;  // every index attaining the maximum
  bool indeterminate = false;           // all-zero row

  std::string label() const {
    std::string out;
    for (std::size_t d : dimensions) {
      if (!out.empty()) out += ';';
      out += kDimensionNames[d];
    }
    return out;
  }
};

inline DominantDimension dominant_dimension(const MoralVector& row) {
  DominantDimension dom;
  const double top = *std::max_element(row.begin(), row.end());
  for (std::size_t d = 0; d < kDimensions; ++d)
    if (row[d] == top) dom.dimensions.push_back(d);
  dom.indeterminate = std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
  return dom;
}

// ---------------------------------------------------------------------------
// Overall morality rankings

struct RankingEntry {
  std::string word;
  double overall = 0;     // sum over the five dimensions
  double normalized = 0;  // MAD-normalized overall
  DominantDimension dominant;
  std::size_t rank = 0;   // 1 = most positive
};

struct MoralityRanking {
  std::vector<RankingEntry> entries;  // descending normalized, ties by word
  double median = 0;
  double mad = 0;
  bool degenerate = false;

  std::vector<RankingEntry> top_positive(std::size_t n) const {
    return {entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(std::min(n, entries.size()))};
  }
  std::vector<RankingEntry> top_negative(std::size_t n) const {
    std::vector<RankingEntry> out(entries.rbegin(),
                                  entries.rbegin() + static_cast<std::ptrdiff_t>(std::min(n, entries.size())));
    return out;
  }
  const RankingEntry* find(const std::string& word) const {
    for (const auto& e : entries)
      if (e.word == word) return &e;
    return nullptr;
  }
};

inline MoralityRanking overall_morality(const GlobalMoralNetwork& gmn) {
  MoralityRanking r;
  std::vector<double> sums;
  for (std::size_t i = 0; i < gmn.size(); ++i) {
    RankingEntry e;
    e.word = gmn.words[i];
    for (double v : gmn.scores.rows[i]) e.overall += v;
    e.dominant = dominant_dimension(gmn.scores.rows[i]);
    sums.push_back(e.overall);
    r.entries.push_back(std::move(e));
  }
  if (sums.size() >= 2) {
    auto mad = stats::mad_normalize(sums);
    r.median = mad.median;
    r.mad = mad.mad;
    r.degenerate = mad.degenerate;
    for (std::size_t i = 0; i < sums.size(); ++i) r.entries[i].normalized = mad.values[i];
  } else {
    r.degenerate = true;
  }
  std::sort(r.entries.begin(), r.entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
    return a.normalized != b.normalized ? a.normalized > b.normalized : a.word < b.word;
  });
  for (std::size_t i = 0; i < r.entries.size(); ++i) r.entries[i].rank = i + 1;
  return r;
}

inline Report to_report(const MoralityRanking& r) {
  Report rep;
  rep.columns = {{"rank", ColumnType::integer},       {"word", ColumnType::text},
                 {"overall_morality", ColumnType::real}, {"normalized_morality", ColumnType::real},
                 {"dominant_dimension", ColumnType::text}, {"indeterminate", ColumnType::boolean}};
  for (const auto& e : r.entries)
    rep.add_row({static_cast<long long>(e.rank), e.word, e.overall, e.normalized, e.dominant.label(),
                 e.dominant.indeterminate});
  return rep;
}

// ---------------------------------------------------------------------------
// Divergence between two rankings

struct DivergenceEntry {
  std::string word;
  double score_a = 0;
  double score_b = 0;
  double difference = 0;  // signed, in the list's direction
  DominantDimension dominant;  // taken from ranking a
};

struct Divergence {
  std::vector<DivergenceEntry> a_over_b;
  std::vector<DivergenceEntry> b_over_a;
};

// Concepts shared by both rankings, ordered by signed difference of the
// normalized morality in each direction.
inline Divergence divergence(const MoralityRanking& a, const MoralityRanking& b, std::size_t top_n) {
  std::map<std::string, const RankingEntry*> in_b;
  for (const auto& e : b.entries) in_b.emplace(e.word, &e);
  std::vector<DivergenceEntry> shared;
  for (const auto& e : a.entries) {
    auto it = in_b.find(e.word);
    if (it == in_b.end()) continue;
    shared.push_back({e.word, e.normalized, it->second->normalized, e.normalized - it->second->normalized, e.dominant});
  }
  auto pick = [&](bool a_first) {
    std::vector<DivergenceEntry> list = shared;
    for (auto& d : list)
      if (!a_first) d.difference = -d.difference;
    std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) {
      return x.difference != y.difference ? x.difference > y.difference : x.word < y.word;
    });
    if (list.size() > top_n) list.resize(top_n);
    return list;
  };
  return {pick(true), pick(false)};
}

inline Report to_report(const Divergence& d) {
  Report rep;
  rep.columns = {{"direction", ColumnType::text}, {"rank", ColumnType::integer},      {"word", ColumnType::text},
                 {"score_a", ColumnType::real},    {"score_b", ColumnType::real},       {"difference", ColumnType::real},
                 {"dominant_dimension", ColumnType::text}};
  rep.key = {0, 1};
  auto emit = [&](const std::vector<DivergenceEntry>& list, const std::string& dir) {
    for (std::size_t i = 0; i < list.size(); ++i)
      rep.add_row({dir, static_cast<long long>(i + 1), list[i].word, list[i].score_a, list[i].score_b,
                   list[i].difference, list[i].dominant.label()});
  };
  emit(d.a_over_b, "a_over_b");
  emit(d.b_over_a, "b_over_a");
  return rep;
}

// ---------------------------------------------------------------------------
// Per-dimension concept selection

struct DimensionConcepts {
  std::vector<std::string> words;  // most negative first
  bool truncated = false;          // fewer than top_n available
};

// The top_n most negative words on dimension d (ties by word).
inline DimensionConcepts top_negative(const GlobalMoralNetwork& gmn, std::size_t d, std::size_t top_n) {
  std::vector<std::size_t> order(gmn.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double a = gmn.scores.rows[x][d], b = gmn.scores.rows[y][d];
    return a != b ? a < b : gmn.words[x] < gmn.words[y];
  });
  DimensionConcepts out;
  out.truncated = top_n > order.size();
  for (std::size_t i = 0; i < std::min(top_n, order.size()); ++i) out.words.push_back(gmn.words[order[i]]);
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon (emotionality / concreteness) analysis

struct ConceptLexiconStats {
  std::string concept_word;
  std::size_t response_types = 0;
  std::size_t in_lexicon = 0;      // distinct response types found in the lexicon
  std::size_t counted = 0;         // of those, scoring above the threshold (if any)
  double proportion = 0;           // percent of response types counted
  double weighted_mean = stats::kNaN;  // NaN when no response is in the lexicon
  bool undefined = true;
};

inline ConceptLexiconStats concept_lexicon_stats(const AssociationGraph& g, const std::string& concept_word,
                                                 const NormLexicon& lexicon, std::optional<double> threshold) {
  ConceptLexiconStats s;
  s.concept_word = normalize_token(concept_word);
  const auto strengths = association_strength(g, s.concept_word, ResponseScope::all_responses);
  s.response_types = strengths.size();
  double mass = 0, weighted = 0;
  for (const auto& [resp, strength] : strengths) {
    const double* score = lexicon.find(resp);
    if (!score) continue;
    ++s.in_lexicon;
    if (!threshold || *score > *threshold) ++s.counted;
    mass += strength;
    weighted += strength * *score;
  }
  if (s.response_types)
    s.proportion = 100.0 * static_cast<double>(s.counted) / static_cast<double>(s.response_types);
  if (mass > 0) {
    s.weighted_mean = weighted / mass;
    s.undefined = false;
  }
  return s;
}

struct LexiconAnalysis {
  std::vector<ConceptLexiconStats> concepts;

  // Unweighted means over concepts; the intensity mean skips undefined ones.
  double mean_proportion() const {
    std::vector<double> xs;
    for (const auto& c : concepts) xs.push_back(c.proportion);
    return stats::mean(xs);
  }
  double mean_weighted() const {
    std::vector<double> xs;
    for (const auto& c : concepts)
      if (!c.undefined) xs.push_back(c.weighted_mean);
    return stats::mean(xs);
  }
};

inline LexiconAnalysis lexicon_analysis(const AssociationGraph& g, const std::vector<std::string>& concepts,
                                        const NormLexicon& lexicon, std::optional<double> threshold = std::nullopt) {
  LexiconAnalysis a;
  for (const auto& c : concepts) a.concepts.push_back(concept_lexicon_stats(g, c, lexicon, threshold));
  return a;
}

// Human-vs-model style comparison of one dimension's concepts: per-concept
// values from each graph, Welch t-tests on proportion and weighted mean.
struct LexiconComparison {
  std::string dimension;
  std::size_t concepts = 0;
  double a_proportion = stats::kNaN, b_proportion = stats::kNaN;
  stats::TTest proportion_test;
  double a_weighted = stats::kNaN, b_weighted = stats::kNaN;
  stats::TTest weighted_test;
};

inline LexiconComparison compare_lexicon(const std::string& dimension, const AssociationGraph& a,
                                         const AssociationGraph& b, const std::vector<std::string>& concepts,
                                         const NormLexicon& lexicon, std::optional<double> threshold,
                                         double alpha = 0.05) {
  std::vector<std::string> in_a, in_b;
  for (const auto& c : concepts) {
    if (a.find(c)) in_a.push_back(c);
    if (b.find(c)) in_b.push_back(c);
  }
  auto la = lexicon_analysis(a, in_a, lexicon, threshold);
  auto lb = lexicon_analysis(b, in_b, lexicon, threshold);
  auto values = [](const LexiconAnalysis& l, bool weighted) {
    std::vector<double> xs;
    for (const auto& c : l.concepts) {
      if (!weighted) xs.push_back(c.proportion);
      else if (!c.undefined) xs.push_back(c.weighted_mean);
    }
    return xs;
  };
  LexiconComparison cmp;
  cmp.dimension = dimension;
  cmp.concepts = concepts.size();
  cmp.a_proportion = la.mean_proportion();
  cmp.b_proportion = lb.mean_proportion();
  cmp.proportion_test = stats::welch_t_test(values(la, false), values(lb, false), alpha);
  cmp.a_weighted = la.mean_weighted();
  cmp.b_weighted = lb.mean_weighted();
  cmp.weighted_test = stats::welch_t_test(values(la, true), values(lb, true), alpha);
  return cmp;
}

inline Report to_report(const std::vector<LexiconComparison>& rows) {
  Report rep;
  rep.columns = {{"order", ColumnType::integer},          {"dimension", ColumnType::text},
                 {"concepts", ColumnType::integer},       {"proportion_a", ColumnType::real},
                 {"proportion_b", ColumnType::real},      {"proportion_p", ColumnType::real},
                 {"proportion_significant", ColumnType::boolean}, {"weighted_mean_a", ColumnType::real},
                 {"weighted_mean_b", ColumnType::real},   {"weighted_mean_p", ColumnType::real},
                 {"weighted_mean_significant", ColumnType::boolean}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    rep.add_row({static_cast<long long>(i), r.dimension, static_cast<long long>(r.concepts), r.a_proportion,
                 r.b_proportion, r.proportion_test.p, r.proportion_test.significant, r.a_weighted, r.b_weighted,
                 r.weighted_test.p, r.weighted_test.significant});
  }
  return rep;
}

inline Report to_report(const LexiconAnalysis& a, const std::string& dimension) {
  Report rep;
  rep.columns = {{"dimension", ColumnType::text},      {"concept", ColumnType::text},
                 {"response_types", ColumnType::integer}, {"in_lexicon", ColumnType::integer},
                 {"proportion", ColumnType::real},     {"weighted_mean", ColumnType::real},
                 {"undefined", ColumnType::boolean}};
  rep.key = {0, 1};
  for (const auto& c : a.concepts)
    rep.add_row({dimension, c.concept_word, static_cast<long long>(c.response_types),
                 static_cast<long long>(c.in_lexicon), c.proportion, c.weighted_mean, c.undefined});
  return rep;
}

// ---------------------------------------------------------------------------
// Pruned vs non-pruned subgraphs of each dimension's most negative concepts

struct DimensionSubgraphs {
  std::string dimension;
  std::vector<std::string> concepts;
  bool truncated = false;
  GraphStats pruned;
  GraphStats non_pruned;
};

// Rows of `gmn` are matched to graph nodes by word; words missing from the
// graph are ignored.
inline std::vector<DimensionSubgraphs> compare_dimension_subgraphs(const GlobalMoralNetwork& gmn,
                                                                   const AssociationGraph& g, std::size_t top_n = 50) {
  GlobalMoralNetwork aligned;
  for (std::size_t i = 0; i < gmn.size(); ++i)
    if (g.find(gmn.words[i])) {
      aligned.words.push_back(gmn.words[i]);
      aligned.scores.rows.push_back(gmn.scores.rows[i]);
      aligned.is_seed.push_back(gmn.is_seed[i]);
    }
  if (aligned.size() == 0) throw ValidationError("moral network shares no word with the graph");
  std::vector<DimensionSubgraphs> out;
  for (std::size_t d = 0; d < kDimensions; ++d) {
    auto sel = top_negative(aligned, d, top_n);
    DimensionSubgraphs ds;
    ds.dimension = std::string(kDimensionNames[d]);
    ds.concepts = sel.words;
    ds.truncated = sel.truncated;
    ds.pruned = compute_stats(extract_subgraph(g, sel.words, true));
    ds.non_pruned = compute_stats(extract_subgraph(g, sel.words, false));
    out.push_back(std::move(ds));
  }
  return out;
}

inline Report stats_report() {
  Report rep;
  rep.columns = {{"label", ColumnType::text},          {"nodes", ColumnType::integer},
                 {"edges", ColumnType::integer},       {"density", ColumnType::real},
                 {"avg_local_clustering", ColumnType::real}, {"diameter", ColumnType::integer},
                 {"largest_component", ColumnType::integer}, {"max_connectivity", ColumnType::integer},
                 {"min_connectivity", ColumnType::integer},  {"avg_connectivity", ColumnType::real},
                 {"sd_connectivity", ColumnType::real}, {"wae", ColumnType::real},
                 {"wdc", ColumnType::real}};
  return rep;
}

inline void add_stats_row(Report& rep, const std::string& label, const GraphStats& s) {
  rep.add_row({label, static_cast<long long>(s.node_count), static_cast<long long>(s.edge_count), s.density,
               s.avg_local_clustering, static_cast<long long>(s.diameter), static_cast<long long>(s.largest_component),
               static_cast<long long>(s.max_connectivity), static_cast<long long>(s.min_connectivity),
               s.avg_connectivity, s.sd_connectivity, s.weighted_avg_edge, s.weighted_degree_centrality});
}

inline Report to_report(const std::vector<DimensionSubgraphs>& dims) {
  Report rep;
  rep.columns = {{"order", ColumnType::integer},        {"dimension", ColumnType::text},
                 {"mode", ColumnType::text},            {"nodes", ColumnType::integer},
                 {"edges", ColumnType::integer},        {"density", ColumnType::real},
                 {"avg_local_clustering", ColumnType::real}, {"wae", ColumnType::real},
                 {"wdc", ColumnType::real},             {"truncated", ColumnType::boolean}};
  rep.key = {0, 2};
  for (std::size_t i = 0; i < dims.size(); ++i)
    for (bool pruned : {true, false}) {
      const GraphStats& s = pruned ? dims[i].pruned : dims[i].non_pruned;
      rep.add_row({static_cast<long long>(i), dims[i].dimension, std::string(pruned ? "pruned" : "non_pruned"),
                   static_cast<long long>(s.node_count), static_cast<long long>(s.edge_count), s.density,
                   s.avg_local_clustering, s.weighted_avg_edge, s.weighted_degree_centrality, dims[i].truncated});
    }
  return rep;
}

}  // namespace moralnet
