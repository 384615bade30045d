#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gm {

// An undirected attributed graph. Adjacency is a dense symmetric 0/1 matrix
// with a zero diagonal; features are one row per node; coords (when present)
// are 2-d positions used for triangulation, one row per node.
struct Graph {
  Eigen::MatrixXd features;            // N x F
  Eigen::MatrixXd adjacency;           // N x N
  std::optional<Eigen::MatrixXd> coords;  // N x 2
  std::string graph_id;
  int class_id = -1;

  int num_nodes() const { return static_cast<int>(features.rows()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }
  int num_edges() const;
  std::vector<int> degrees() const;

  // Throws DataError when any structural invariant is violated.
  void validate() const;
};

// A source/target graph pair with a ground-truth partial node matching
// (source index, target index), injective on both sides.
struct GraphPair {
  Graph source;
  Graph target;
  std::vector<std::pair<int, int>> gt_matching;

  void validate() const;
};

// Upper-triangle edge list (i < j), sorted lexicographically.
std::vector<std::pair<int, int>> edges_of(const Eigen::MatrixXd& adjacency);

// Symmetric 0/1 adjacency from an edge list. Throws DataError on
// out-of-range endpoints or self-loops.
Eigen::MatrixXd adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges);

// Induced subgraph on the given (sorted, distinct) node indices; keeps
// features, induced adjacency and the matching rows of coords.
Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes);

}  // namespace gm
