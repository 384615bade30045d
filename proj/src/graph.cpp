#include "gm/graph.hpp"

#include <algorithm>
#include <set>

#include "gm/errors.hpp"

namespace gm {

int Graph::num_edges() const {
  const int n = num_nodes();
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adjacency(i, j) != 0.0) ++count;
  return count;
}

std::vector<int> Graph::degrees() const {
  const int n = num_nodes();
  std::vector<int> deg(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (adjacency(i, j) != 0.0) ++deg[i];
  return deg;
}

void Graph::validate() const {
  const int n = num_nodes();
  if (n < 1) throw DataError("graph '" + graph_id + "': must have at least one node");
  if (feature_dim() < 1) throw DataError("graph '" + graph_id + "': must have at least one feature dimension");
  if (!features.allFinite()) throw DataError("graph '" + graph_id + "': non-finite feature values");
  if (adjacency.rows() != n || adjacency.cols() != n)
    throw DataError("graph '" + graph_id + "': adjacency must be N x N");
  for (int i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0)
      throw DataError("graph '" + graph_id + "': adjacency has a nonzero diagonal entry");
    for (int j = 0; j < n; ++j) {
      const double a = adjacency(i, j);
      if (a != 0.0 && a != 1.0)
        throw DataError("graph '" + graph_id + "': adjacency entries must be 0 or 1");
      if (a != adjacency(j, i))
        throw DataError("graph '" + graph_id + "': adjacency must be symmetric");
    }
  }
  if (coords) {
    if (coords->rows() != n || coords->cols() != 2)
      throw DataError("graph '" + graph_id + "': coords must be N x 2");
    if (!coords->allFinite()) throw DataError("graph '" + graph_id + "': non-finite coords");
  }
}

void GraphPair::validate() const {
  source.validate();
  target.validate();
  std::set<int> src_seen, tgt_seen;
  for (const auto& [s, t] : gt_matching) {
    if (s < 0 || s >= source.num_nodes() || t < 0 || t >= target.num_nodes())
      throw DataError("pair (" + source.graph_id + ", " + target.graph_id +
                      "): matching index out of range");
    if (!src_seen.insert(s).second || !tgt_seen.insert(t).second)
      throw DataError("pair (" + source.graph_id + ", " + target.graph_id +
                      "): matching is not injective");
  }
}

std::vector<std::pair<int, int>> edges_of(const Eigen::MatrixXd& adjacency) {
  std::vector<std::pair<int, int>> edges;
  const int n = static_cast<int>(adjacency.rows());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adjacency(i, j) != 0.0) edges.emplace_back(i, j);
  return edges;
}

Eigen::MatrixXd adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw DataError("edge endpoint out of range");
    if (i == j) throw DataError("self-loops are not allowed");
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return a;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes) {
  const int m = static_cast<int>(nodes.size());
  Graph out;
  out.graph_id = g.graph_id;
  out.class_id = g.class_id;
  out.features.resize(m, g.feature_dim());
  out.adjacency = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    if (nodes[i] < 0 || nodes[i] >= g.num_nodes())
      throw DataError("induced_subgraph: node index out of range");
    out.features.row(i) = g.features.row(nodes[i]);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.adjacency(i, j) = g.adjacency(nodes[i], nodes[j]);
  if (g.coords) {
    Eigen::MatrixXd c(m, 2);
    for (int i = 0; i < m; ++i) c.row(i) = g.coords->row(nodes[i]);
    out.coords = std::move(c);
  }
  return out;
}

}  // namespace gm
