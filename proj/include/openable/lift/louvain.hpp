#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

namespace openable {

/// Undirected weighted graph in adjacency-list form. Each undirected edge
/// {i, j} (i != j) must appear in both lists; neighbours sorted by index.
struct WeightedGraph {
  struct Edge {
    int to;
    double weight;
  };
  std::vector<std::vector<Edge>> adj;

  int size() const { return static_cast<int>(adj.size()); }
  /// Builds from a list of (i, j, w) with i < j; duplicates are summed.
  static WeightedGraph from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges);
};

struct LouvainOptions {
  double resolution = 1.0;
  double min_gain = 1e-12;
  int max_levels = 32;
  int max_passes = 100;
};

/// Multilevel Louvain modularity maximization followed by one node-level
/// refinement pass. Nodes are visited in index order and ties go to the
/// lowest community id, so the result is a pure function of the graph.
/// Returns community labels 0..C-1 numbered by their smallest member.
std::vector<int> louvain(const WeightedGraph& g, const LouvainOptions& opts = {});

/// Newman–Girvan modularity of a partition.
double modularity(const WeightedGraph& g, const std::vector<int>& labels, double resolution = 1.0);

}  // namespace openable
