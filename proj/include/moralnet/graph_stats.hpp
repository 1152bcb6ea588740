#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "moralnet/graph.hpp"

namespace moralnet {

// Statistics on the symmetrized graph. Unweighted quantities use the
// binarized W; connectivity is the node degree.
struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double density = 0;
  double avg_local_clustering = 0;
  std::size_t diameter = 0;             // on the largest connected component
  std::size_t largest_component = 0;    // node count of that component
  double component_coverage = 0;        // largest_component / node_count
  std::size_t max_connectivity = 0;
  std::size_t min_connectivity = 0;
  double avg_connectivity = 0;
  double sd_connectivity = 0;           // population standard deviation
  double weighted_avg_edge = 0;         // WAE: total edge weight / edge count
  double weighted_degree_centrality = 0;  // WDC: mean weighted degree
};

namespace detail {

// Hop distances from `source`; unreachable nodes get -1.
inline std::vector<int> bfs_distances(const CsrMatrix& w, std::size_t source) {
  std::vector<int> dist(w.rows(), -1);
  std::vector<Index> frontier{static_cast<Index>(source)};
  dist[source] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    Index u = frontier[head];
    for (Index v : w.row_indices(u))
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
  }
  return dist;
}

inline int eccentricity(const CsrMatrix& w, std::size_t source) {
  auto d = bfs_distances(w, source);
  return *std::max_element(d.begin(), d.end());
}

// Nodes of the largest connected component (ties: the one holding the
// smallest node index), ascending.
inline std::vector<Index> largest_component(const CsrMatrix& w) {
  std::vector<int> comp(w.rows(), -1);
  std::vector<Index> best;
  for (std::size_t s = 0; s < w.rows(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<Index> members{static_cast<Index>(s)};
    comp[s] = static_cast<int>(s);
    for (std::size_t head = 0; head < members.size(); ++head)
      for (Index v : w.row_indices(members[head]))
        if (comp[v] < 0) {
          comp[v] = static_cast<int>(s);
          members.push_back(v);
        }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  return best;
}

// Exact diameter of the component containing the highest-degree node of
// `component`, by iterative fringe upper bounding: BFS levels from a central
// node bound the eccentricity of everything above the current fringe.
inline std::size_t component_diameter(const CsrMatrix& w, const std::vector<Index>& component) {
  if (component.size() < 2) return 0;
  Index root = component.front();
  for (Index v : component)
    if (w.row_size(v) > w.row_size(root)) root = v;
  auto dist = bfs_distances(w, root);
  int ecc_root = 0;
  for (Index v : component) ecc_root = std::max(ecc_root, dist[v]);
  std::vector<std::vector<Index>> levels(ecc_root + 1);
  for (Index v : component) levels[dist[v]].push_back(v);

  int lower = ecc_root;
  for (int i = ecc_root; i >= 1; --i) {
    int fringe = 0;
    for (Index v : levels[i]) fringe = std::max(fringe, eccentricity(w, v));
    lower = std::max(lower, fringe);
    if (lower > 2 * (i - 1)) return static_cast<std::size_t>(lower);
  }
  return static_cast<std::size_t>(lower);
}

}  // namespace detail

inline GraphStats compute_stats(const AssociationGraph& g) {
  if (g.size() == 0) throw ValidationError("cannot compute statistics of an empty graph");
  const CsrMatrix& w = g.weights;
  const std::size_t n = g.size();
  GraphStats s;
  s.node_count = n;

  double total_weight = 0;
  double weighted_degree_sum = 0;
  std::vector<std::size_t> degree(n);
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = w.row_size(v);
    auto idx = w.row_indices(v);
    auto val = w.row_values(v);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      weighted_degree_sum += val[k];
      if (idx[k] > v) {
        ++s.edge_count;
        total_weight += val[k];
      }
    }
  }
  if (n > 1) s.density = static_cast<double>(s.edge_count) / (static_cast<double>(n) * (n - 1) / 2.0);
  s.weighted_avg_edge = s.edge_count ? total_weight / static_cast<double>(s.edge_count) : 0.0;
  s.weighted_degree_centrality = weighted_degree_sum / static_cast<double>(n);

  s.max_connectivity = *std::max_element(degree.begin(), degree.end());
  s.min_connectivity = *std::min_element(degree.begin(), degree.end());
  double mean = 0;
  for (auto d : degree) mean += static_cast<double>(d);
  mean /= static_cast<double>(n);
  double var = 0;
  for (auto d : degree) var += (static_cast<double>(d) - mean) * (static_cast<double>(d) - mean);
  s.avg_connectivity = mean;
  s.sd_connectivity = std::sqrt(var / static_cast<double>(n));

  // Local clustering: closed neighbor pairs over possible pairs; degree < 2 -> 0.
  std::vector<char> mark(n, 0);
  double clustering_sum = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t k = degree[v];
    if (k < 2) continue;
    auto nbrs = w.row_indices(v);
    for (Index u : nbrs) mark[u] = 1;
    std::size_t links = 0;
    for (Index u : nbrs)
      for (Index x : w.row_indices(u)) links += mark[x];
    for (Index u : nbrs) mark[u] = 0;
    clustering_sum += static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }
  s.avg_local_clustering = clustering_sum / static_cast<double>(n);

  auto lcc = detail::largest_component(w);
  s.largest_component = lcc.size();
  s.component_coverage = static_cast<double>(lcc.size()) / static_cast<double>(n);
  s.diameter = detail::component_diameter(w, lcc);
  return s;
}

}  // namespace moralnet
