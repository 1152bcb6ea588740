#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "moralnet/csv.hpp"
#include "moralnet/data_io.hpp"
#include "moralnet/error.hpp"
#include "moralnet/sparse.hpp"

namespace moralnet {

enum class Symmetrization { sum, max };

// How much of a cue's response distribution a strength computation sees:
// only responses that are themselves graph nodes, or every response type.
enum class ResponseScope { in_vocabulary, all_responses };

struct ResponseCount {
  Index type;  // into AssociationGraph::response_types
  std::uint32_t count;
};

// Cue-vocabulary association graph. Nodes are sorted tokens; `weights` is the
// symmetric adjacency W with a zero diagonal; `directed_counts` holds the raw
// cue -> in-vocabulary response counts. `responses` keeps every response type
// (in or out of vocabulary) per node for response-level analyses.
struct AssociationGraph {
  std::vector<std::string> nodes;
  std::unordered_map<std::string, Index> index;
  CsrMatrix weights;
  CsrMatrix directed_counts;
  std::shared_ptr<const std::vector<std::string>> response_types =
      std::make_shared<const std::vector<std::string>>();
  std::vector<std::vector<ResponseCount>> responses;

  std::size_t size() const { return nodes.size(); }

  std::optional<Index> find(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? std::nullopt : std::optional(it->second);
  }

  Index require(const std::string& token) const {
    auto i = find(token);
    if (!i) throw ValidationError("'" + token + "' is not in the graph vocabulary");
    return *i;
  }

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (std::size_t r = 0; r < weights.rows(); ++r)
      for (Index c : weights.row_indices(r)) m += c > r;
    return m;
  }
};

namespace detail {

inline void index_nodes(AssociationGraph& g) {
  g.index.clear();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) g.index.emplace(g.nodes[i], static_cast<Index>(i));
}

inline CsrMatrix symmetrize(const CsrMatrix& counts, Symmetrization mode) {
  std::vector<Triplet> t;
  t.reserve(counts.nonzeros() * 2);
  for (const auto& e : counts.triplets()) {
    if (e.row == e.col) continue;
    t.push_back(e);
    t.push_back({e.col, e.row, e.value});
  }
  if (mode == Symmetrization::sum) return CsrMatrix::from_triplets(counts.rows(), counts.cols(), std::move(t));
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col, a.value) < std::tie(b.row, b.col, b.value);
  });
  std::vector<Triplet> maxed;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (i + 1 == t.size() || t[i + 1].row != t[i].row || t[i + 1].col != t[i].col) maxed.push_back(t[i]);
  return CsrMatrix::from_triplets(counts.rows(), counts.cols(), std::move(maxed));
}

}  // namespace detail

inline AssociationGraph build_graph(const AssociationCorpus& corpus, const std::vector<std::string>& vocabulary,
                                    Symmetrization mode = Symmetrization::sum) {
  if (corpus.records.empty()) throw ValidationError("cannot build a graph from an empty corpus");
  std::set<std::string> vocab;
  for (const auto& t : vocabulary) {
    std::string n = normalize_token(t);
    if (!n.empty()) vocab.insert(std::move(n));
  }
  if (vocab.empty()) throw ValidationError("vocabulary is empty");

  AssociationGraph g;
  g.nodes.assign(vocab.begin(), vocab.end());
  detail::index_nodes(g);
  const std::size_t n = g.size();

  std::vector<std::string> types;
  std::unordered_map<std::string, Index> type_index;
  std::vector<std::map<Index, std::uint32_t>> per_node(n);
  std::vector<Triplet> directed;
  for (const auto& rec : corpus.records) {
    auto cue = g.find(rec.cue);
    if (!cue) continue;
    std::vector<std::string> seen;
    for (const auto& r : rec.responses) {
      if (r.empty() || std::find(seen.begin(), seen.end(), r) != seen.end()) continue;
      seen.push_back(r);
      auto [it, fresh] = type_index.emplace(r, static_cast<Index>(types.size()));
      if (fresh) types.push_back(r);
      ++per_node[*cue][it->second];
      if (auto resp = g.find(r)) directed.push_back({*cue, *resp, 1.0});
    }
  }
  g.directed_counts = CsrMatrix::from_triplets(n, n, std::move(directed));
  g.weights = detail::symmetrize(g.directed_counts, mode);
  g.response_types = std::make_shared<const std::vector<std::string>>(std::move(types));
  g.responses.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto [type, count] : per_node[i]) g.responses[i].push_back({type, count});
  return g;
}

// Strength_r = f_r / N for each response r of `cue`. With in_vocabulary scope
// N counts only responses that are graph nodes, so strengths sum to 1 over
// them. A cue without responses yields an empty map.
inline std::map<std::string, double> association_strength(const AssociationGraph& g, const std::string& cue,
                                                          ResponseScope scope = ResponseScope::in_vocabulary) {
  const Index c = g.require(normalize_token(cue));
  std::map<std::string, double> out;
  double total = 0;
  if (scope == ResponseScope::in_vocabulary) {
    auto idx = g.directed_counts.row_indices(c);
    auto val = g.directed_counts.row_values(c);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out[g.nodes[idx[k]]] += val[k];
      total += val[k];
    }
  } else if (c < g.responses.size()) {
    for (const auto& rc : g.responses[c]) {
      out[(*g.response_types)[rc.type]] += rc.count;
      total += rc.count;
    }
  }
  if (total > 0)
    for (auto& [_, v] : out) v /= total;
  return out;
}

// Induced subgraph on `seeds` (pruned) or on seeds plus all their neighbors.
inline AssociationGraph extract_subgraph(const AssociationGraph& g, const std::vector<std::string>& seeds,
                                         bool pruned) {
  if (seeds.empty()) throw ValidationError("subgraph seed set is empty");
  std::vector<char> keep(g.size(), 0);
  for (const auto& s : seeds) keep[g.require(normalize_token(s))] = 1;
  if (!pruned) {
    std::vector<char> closure = keep;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (keep[i])
        for (Index j : g.weights.row_indices(i)) closure[j] = 1;
    keep = std::move(closure);
  }
  std::vector<Index> remap(g.size(), 0);
  AssociationGraph sub;
  sub.response_types = g.response_types;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<Index>(sub.nodes.size());
    sub.nodes.push_back(g.nodes[i]);
    sub.responses.push_back(i < g.responses.size() ? g.responses[i] : std::vector<ResponseCount>{});
  }
  detail::index_nodes(sub);
  auto induce = [&](const CsrMatrix& m) {
    std::vector<Triplet> t;
    for (const auto& e : m.triplets())
      if (keep[e.row] && keep[e.col]) t.push_back({remap[e.row], remap[e.col], e.value});
    return CsrMatrix::from_triplets(sub.size(), sub.size(), std::move(t));
  };
  sub.weights = induce(g.weights);
  sub.directed_counts = g.directed_counts.rows() == g.size() ? induce(g.directed_counts)
                                                             : CsrMatrix(sub.size(), sub.size());
  return sub;
}

// ---------------------------------------------------------------------------
// Serialization: node list `token` plus edge list `token_a,token_b,weight`
// (each undirected edge once, in node order).

inline std::string format_weight(double w) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, ptr);
}

inline void write_graph(const AssociationGraph& g, const std::string& nodes_path, const std::string& edges_path) {
  write_token_list(nodes_path, g.nodes);
  auto out = csv::open_output(edges_path);
  csv::write_row(out, {"token_a", "token_b", "weight"});
  for (std::size_t r = 0; r < g.size(); ++r) {
    auto idx = g.weights.row_indices(r);
    auto val = g.weights.row_values(r);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] > r) csv::write_row(out, {g.nodes[r], g.nodes[idx[k]], format_weight(val[k])});
  }
  out.flush();
  if (!out) throw IoError("failed writing '" + edges_path + "'");
}

// Loads W only; directed counts and response distributions are not part of
// the edge-list format.
inline AssociationGraph read_graph(const std::string& nodes_path, const std::string& edges_path) {
  AssociationGraph g;
  g.nodes = read_token_list(nodes_path).tokens;
  std::sort(g.nodes.begin(), g.nodes.end());
  detail::index_nodes(g);
  auto in = csv::open_input(edges_path);
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.next(row) || row.size() < 3 || normalize_token(row[0]) != "token_a")
    throw FormatError(edges_path + ": header must be token_a,token_b,weight");
  std::vector<Triplet> t;
  while (reader.next(row)) {
    const std::string where = csv::location(edges_path, reader.line());
    if (row.size() < 3) throw FormatError(where + ": expected 3 fields");
    auto a = g.find(normalize_token(row[0]));
    auto b = g.find(normalize_token(row[1]));
    auto w = csv::parse_real(row[2]);
    if (!a || !b) throw FormatError(where + ": edge endpoint not in node list");
    if (!w || *w < 0) throw FormatError(where + ": weight must be a nonnegative number");
    if (*a == *b) throw FormatError(where + ": self loop");
    t.push_back({*a, *b, *w});
    t.push_back({*b, *a, *w});
  }
  g.weights = CsrMatrix::from_triplets(g.size(), g.size(), std::move(t));
  g.directed_counts = CsrMatrix(g.size(), g.size());
  g.responses.assign(g.size(), {});
  return g;
}

}  // namespace moralnet
