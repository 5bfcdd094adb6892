#include "openable/lift/louvain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace openable {

WeightedGraph WeightedGraph::from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<std::map<int, double>> acc(static_cast<std::size_t>(n));
  for (const auto& [i, j, w] : edges) {
    if (i == j) continue;
    acc[i][j] += w;
    acc[j][i] += w;
  }
  WeightedGraph g;
  g.adj.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g.adj[i].reserve(acc[i].size());
    for (const auto& [j, w] : acc[i]) g.adj[i].push_back({j, w});
  }
  return g;
}

namespace {

struct Level {
  std::vector<std::vector<WeightedGraph::Edge>> adj;  // no self entries
  std::vector<double> self;                           // A_ii
  std::vector<double> degree;
  double total = 0.0;  // 2m
};

Level from_graph(const WeightedGraph& g) {
  Level l;
  l.adj = g.adj;
  l.self.assign(g.adj.size(), 0.0);
  l.degree.assign(g.adj.size(), 0.0);
  for (std::size_t i = 0; i < g.adj.size(); ++i) {
    for (const auto& e : g.adj[i]) l.degree[i] += e.weight;
    l.total += l.degree[i];
  }
  return l;
}

// Relabels so that community ids are 0..C-1 in order of their smallest node.
int renumber(std::vector<int>& comm) {
  std::vector<int> map(comm.size(), -1);
  int next = 0;
  for (auto& c : comm) {
    if (map[c] < 0) map[c] = next++;
    c = map[c];
  }
  return next;
}

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const Level& l, std::vector<int>& comm, const LouvainOptions& opts, int max_passes) {
  const int n = static_cast<int>(l.adj.size());
  std::vector<double> tot(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) tot[comm[i]] += l.degree[i];
  std::vector<double> w_to(static_cast<std::size_t>(n), 0.0);
  std::vector<int> touched;
  bool any = false;
  const double m2 = l.total;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      const int c_old = comm[i];
      const double ki = l.degree[i];
      touched.clear();
      for (const auto& e : l.adj[i]) {
        const int c = comm[e.to];
        if (w_to[c] == 0.0) touched.push_back(c);
        w_to[c] += e.weight;
      }
      tot[c_old] -= ki;
      const double stay = w_to[c_old] - opts.resolution * tot[c_old] * ki / m2;
      int best = c_old;
      double best_gain = stay;
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        if (c == c_old) continue;
        const double gain = w_to[c] - opts.resolution * tot[c] * ki / m2;
        if (gain > best_gain + opts.min_gain ||
            (best != c_old && std::abs(gain - best_gain) <= opts.min_gain && c < best)) {
          best = c;
          best_gain = gain;
        }
      }
      if (best != c_old && !(best_gain > stay + opts.min_gain)) best = c_old;
      tot[best] += ki;
      comm[i] = best;
      if (best != c_old) improved = true;
      for (int c : touched) w_to[c] = 0.0;
    }
    if (!improved) break;
    any = true;
  }
  return any;
}

Level aggregate(const Level& l, const std::vector<int>& comm, int count) {
  Level out;
  out.adj.resize(static_cast<std::size_t>(count));
  out.self.assign(static_cast<std::size_t>(count), 0.0);
  out.degree.assign(static_cast<std::size_t>(count), 0.0);
  out.total = l.total;
  std::vector<std::map<int, double>> acc(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < l.adj.size(); ++i) {
    const int ci = comm[i];
    out.self[ci] += l.self[i];
    out.degree[ci] += l.degree[i];
    for (const auto& e : l.adj[i]) {
      const int cj = comm[e.to];
      if (ci == cj) {
        out.self[ci] += e.weight;
      } else {
        acc[ci][cj] += e.weight;
      }
    }
  }
  for (int c = 0; c < count; ++c) {
    for (const auto& [d, w] : acc[c]) out.adj[c].push_back({d, w});
  }
  return out;
}

}  // namespace

std::vector<int> louvain(const WeightedGraph& g, const LouvainOptions& opts) {
  const int n = g.size();
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::iota(labels.begin(), labels.end(), 0);
  const Level base = from_graph(g);
  if (n == 0 || base.total <= 0.0) return labels;

  Level level = base;
  for (int depth = 0; depth < opts.max_levels; ++depth) {
    std::vector<int> comm(level.adj.size());
    std::iota(comm.begin(), comm.end(), 0);
    const bool moved = move_nodes(level, comm, opts, opts.max_passes);
    const int count = renumber(comm);
    for (auto& lab : labels) lab = comm[lab];
    if (!moved || count == static_cast<int>(level.adj.size())) break;
    level = aggregate(level, comm, count);
  }
  renumber(labels);
  move_nodes(base, labels, opts, 1);
  renumber(labels);
  return labels;
}

double modularity(const WeightedGraph& g, const std::vector<int>& labels, double resolution) {
  const Level l = from_graph(g);
  if (l.total <= 0.0) return 0.0;
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> in(static_cast<std::size_t>(count), 0.0);
  std::vector<double> tot(static_cast<std::size_t>(count), 0.0);
  for (std::size_t i = 0; i < l.adj.size(); ++i) {
    tot[labels[i]] += l.degree[i];
    for (const auto& e : l.adj[i]) {
      if (labels[e.to] == labels[i]) in[labels[i]] += e.weight;
    }
  }
  double q = 0.0;
  for (int c = 0; c < count; ++c) {
    q += in[c] / l.total - resolution * (tot[c] / l.total) * (tot[c] / l.total);
  }
  return q;
}

}  // namespace openable
