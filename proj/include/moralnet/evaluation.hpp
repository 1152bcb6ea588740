#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "moralnet/data_io.hpp"
#include "moralnet/graph.hpp"
#include "moralnet/propagation.hpp"
#include "moralnet/report.hpp"
#include "moralnet/statistics.hpp"

namespace moralnet {

// A candidate's ranked responses for one cue. Each group holds responses of
// equal strength, lexicographically ordered; groups run strongest first.
using TieGroups = std::vector<std::vector<std::string>>;

inline TieGroups rank_responses(const std::map<std::string, double>& strengths) {
  std::vector<std::pair<std::string, double>> items(strengths.begin(), strengths.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  TieGroups groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == 0 || items[i].second != items[i - 1].second) groups.emplace_back();
    groups.back().push_back(items[i].first);
  }
  return groups;
}

inline std::set<std::string> response_set(const AssociationGraph& g, Index node) {
  std::set<std::string> out;
  if (node < g.responses.size())
    for (const auto& rc : g.responses[node]) out.insert((*g.response_types)[rc.type]);
  return out;
}

struct PrecisionCurve {
  std::vector<std::size_t> k;
  std::vector<double> mean;
  std::vector<double> sd;  // over resampling runs
  std::size_t cues_used = 0;
  std::vector<std::string> skipped_cues;
  double mean_strength_correlation = stats::kNaN;
  std::size_t correlation_cues = 0;     // cues with a defined correlation
  std::size_t correlation_skipped = 0;  // intersection below 3 or undefined
};

// P@k = |top-k ∩ reference| / k, averaged over cues. Run 0 uses the
// lexicographic tie order; later runs shuffle within tie groups.
inline PrecisionCurve precision_curve(const std::vector<TieGroups>& rankings,
                                      const std::vector<std::set<std::string>>& references, std::size_t max_k,
                                      std::size_t runs, std::uint64_t seed) {
  if (max_k == 0) throw ValidationError("K must be positive");
  if (runs == 0) throw ValidationError("runs must be positive");
  PrecisionCurve curve;
  curve.cues_used = rankings.size();
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> per_run(runs, std::vector<double>(max_k, 0.0));
  for (std::size_t run = 0; run < runs; ++run) {
    for (std::size_t c = 0; c < rankings.size(); ++c) {
      std::vector<std::string> order;
      for (auto group : rankings[c]) {
        if (run > 0) std::shuffle(group.begin(), group.end(), rng);
        order.insert(order.end(), group.begin(), group.end());
      }
      std::size_t hits = 0;
      for (std::size_t k = 1; k <= max_k; ++k) {
        if (k <= order.size() && references[c].count(order[k - 1])) ++hits;
        per_run[run][k - 1] += static_cast<double>(hits) / static_cast<double>(k);
      }
    }
    if (!rankings.empty())
      for (double& v : per_run[run]) v /= static_cast<double>(rankings.size());
  }
  for (std::size_t k = 1; k <= max_k; ++k) {
    std::vector<double> xs;
    for (const auto& r : per_run) xs.push_back(r[k - 1]);
    const double m = stats::mean(xs);
    double var = 0;
    for (double x : xs) var += (x - m) * (x - m);
    curve.k.push_back(k);
    curve.mean.push_back(rankings.empty() ? stats::kNaN : m);
    curve.sd.push_back(rankings.empty() ? stats::kNaN : std::sqrt(var / static_cast<double>(xs.size())));
  }
  return curve;
}

inline constexpr std::size_t kMinSharedResponses = 3;

// Spearman correlation of the two graphs' association strengths for `cue`
// over the response types both produced. Empty when fewer than 3 are shared
// or the correlation is undefined.
inline std::optional<double> strength_correlation(const AssociationGraph& candidate, const AssociationGraph& reference,
                                                  const std::string& cue) {
  auto a = association_strength(candidate, cue, ResponseScope::all_responses);
  auto b = association_strength(reference, cue, ResponseScope::all_responses);
  std::vector<double> xs, ys;
  for (const auto& [tok, s] : a) {
    auto it = b.find(tok);
    if (it == b.end()) continue;
    xs.push_back(s);
    ys.push_back(it->second);
  }
  if (xs.size() < kMinSharedResponses) return std::nullopt;
  auto c = stats::spearman(xs, ys);
  if (!c.defined()) return std::nullopt;
  return c.rho;
}

inline PrecisionCurve precision_at_k(const AssociationGraph& candidate, const AssociationGraph& reference,
                                     const std::vector<std::string>& cues, std::size_t max_k, std::size_t runs = 50,
                                     std::uint64_t seed = 0) {
  std::vector<TieGroups> rankings;
  std::vector<std::set<std::string>> refs;
  std::vector<std::string> used, skipped;
  for (const auto& raw : cues) {
    const std::string cue = normalize_token(raw);
    auto ci = candidate.find(cue);
    auto ri = reference.find(cue);
    if (!ci || !ri) {
      skipped.push_back(cue);
      continue;
    }
    rankings.push_back(rank_responses(association_strength(candidate, cue, ResponseScope::all_responses)));
    refs.push_back(response_set(reference, *ri));
    used.push_back(cue);
  }
  PrecisionCurve curve = precision_curve(rankings, refs, max_k, runs, seed);
  curve.skipped_cues = std::move(skipped);
  std::vector<double> cors;
  for (const auto& cue : used) {
    if (auto r = strength_correlation(candidate, reference, cue)) cors.push_back(*r);
    else ++curve.correlation_skipped;
  }
  curve.correlation_cues = cors.size();
  curve.mean_strength_correlation = stats::mean(cors);
  return curve;
}

// Top-k tokens by cosine similarity, excluding the cue itself; equal
// similarities ordered lexicographically.
inline std::vector<std::string> embedding_neighbors(const EmbeddingTable& table, const std::string& cue, std::size_t k) {
  auto ci = table.find(normalize_token(cue));
  if (!ci) throw ValidationError("cue '" + cue + "' is not in the embedding table");
  auto norm = [&](std::size_t i) {
    double s = 0;
    for (std::size_t d = 0; d < table.dimension; ++d) s += double(table.vector(i)[d]) * table.vector(i)[d];
    return std::sqrt(s);
  };
  const double cn = norm(*ci);
  std::vector<std::pair<double, std::size_t>> sims;
  sims.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i == *ci) continue;
    double dot = 0;
    for (std::size_t d = 0; d < table.dimension; ++d) dot += double(table.vector(*ci)[d]) * table.vector(i)[d];
    sims.emplace_back(dot / (cn * norm(i)), i);
  }
  auto better = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return table.words[a.second] < table.words[b.second];
  };
  const std::size_t take = std::min(k, sims.size());
  std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(take), sims.end(), better);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(table.words[sims[i].second]);
  return out;
}

// Embedding-neighbor baseline scored against the reference graph's responses.
inline PrecisionCurve precision_at_k(const EmbeddingTable& table, const AssociationGraph& reference,
                                     const std::vector<std::string>& cues, std::size_t max_k) {
  std::vector<TieGroups> rankings;
  std::vector<std::set<std::string>> refs;
  std::vector<std::string> skipped;
  for (const auto& raw : cues) {
    const std::string cue = normalize_token(raw);
    auto ri = reference.find(cue);
    if (!ri || !table.find(cue)) {
      skipped.push_back(cue);
      continue;
    }
    TieGroups groups;
    for (auto& w : embedding_neighbors(table, cue, max_k)) groups.push_back({std::move(w)});
    rankings.push_back(std::move(groups));
    refs.push_back(response_set(reference, *ri));
  }
  PrecisionCurve curve = precision_curve(rankings, refs, max_k, 1, 0);
  curve.skipped_cues = std::move(skipped);
  return curve;
}

// ---------------------------------------------------------------------------
// GMN vs soft gold lexicon

inline constexpr std::size_t kLowSupport = 10;

struct EvalRow {
  std::string name;
  std::size_t n = 0;
  double rho = stats::kNaN;
  double p = stats::kNaN;
  bool low_support = false;
};

struct EvalReport {
  std::array<EvalRow, kDimensions> dimensions;
  EvalRow overall;
};

// Published per-dimension correlations of the Moral Association Graph
// baseline (care, fairness, loyalty, authority, sanctity, all), shown beside
// our results; never recomputed.
inline constexpr std::array<double, kDimensions + 1> kMagBaseline = {0.29, 0.23, 0.30, 0.21, 0.25, 0.20};

namespace detail {

inline EvalRow correlate(std::string name, const std::vector<double>& xs, const std::vector<double>& ys) {
  EvalRow row{std::move(name), xs.size()};
  row.low_support = xs.size() < kLowSupport;
  if (xs.size() >= 3) {
    auto c = stats::spearman(xs, ys);
    row.rho = c.rho;
    row.p = c.p;
  }
  return row;
}

}  // namespace detail

// Pairs each unmasked word's score with its gold value, per dimension and
// pooled over all (word, dimension) pairs. An empty mask evaluates every row.
inline EvalReport evaluate_gmn(const GlobalMoralNetwork& gmn, const std::vector<bool>& mask, const MoralLexicon& gold) {
  if (gold.kind != LexiconKind::soft) throw ValidationError("gold lexicon must be a soft lexicon");
  if (!mask.empty() && mask.size() != gmn.size()) throw ValidationError("evaluation mask is not aligned");
  std::map<std::string, std::size_t> rows;
  for (std::size_t i = 0; i < gmn.size(); ++i)
    if (mask.empty() || mask[i]) rows.emplace(gmn.words[i], i);
  EvalReport report;
  std::vector<double> all_x, all_y;
  for (std::size_t d = 0; d < kDimensions; ++d) {
    std::vector<double> xs, ys;
    for (const auto& [word, values] : gold.entries) {
      auto it = rows.find(word);
      if (it == rows.end() || !values[d]) continue;
      xs.push_back(gmn.scores.rows[it->second][d]);
      ys.push_back(*values[d]);
    }
    all_x.insert(all_x.end(), xs.begin(), xs.end());
    all_y.insert(all_y.end(), ys.begin(), ys.end());
    report.dimensions[d] = detail::correlate(std::string(kDimensionNames[d]), xs, ys);
  }
  report.overall = detail::correlate("all", all_x, all_y);
  return report;
}

inline Report to_report(const EvalReport& e) {
  Report r;
  r.columns = {{"order", ColumnType::integer}, {"dimension", ColumnType::text}, {"n", ColumnType::integer},
               {"spearman_rho", ColumnType::real},  {"p_value", ColumnType::real},  {"low_support", ColumnType::boolean},
               {"published_mag", ColumnType::real}};
  for (std::size_t d = 0; d <= kDimensions; ++d) {
    const EvalRow& row = d < kDimensions ? e.dimensions[d] : e.overall;
    r.add_row({static_cast<long long>(d), row.name, static_cast<long long>(row.n), row.rho, row.p, row.low_support,
               kMagBaseline[d]});
  }
  return r;
}

inline Report to_report(const PrecisionCurve& c, const std::string& label = "") {
  Report r;
  r.columns = {{"series", ColumnType::text}, {"k", ColumnType::integer}, {"precision_mean", ColumnType::real},
               {"precision_sd", ColumnType::real}};
  r.key = {0, 1};
  for (std::size_t i = 0; i < c.k.size(); ++i)
    r.add_row({label, static_cast<long long>(c.k[i]), c.mean[i], c.sd[i]});
  return r;
}

}  // namespace moralnet
