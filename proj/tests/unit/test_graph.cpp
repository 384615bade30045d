#include <doctest.h>

#include <Eigen/Dense>

#include "gm/errors.hpp"
#include "gm/graph.hpp"

using gm::Graph;
using gm::GraphPair;

namespace {

Graph path_graph(int n, int feature_dim = 3) {
  Graph g;
  g.graph_id = "path";
  g.features = Eigen::MatrixXd::Zero(n, feature_dim);
  for (int i = 0; i < n; ++i) g.features(i, 0) = static_cast<double>(i);
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    g.adjacency(i, i + 1) = 1.0;
    g.adjacency(i + 1, i) = 1.0;
  }
  return g;
}

}  // namespace

TEST_CASE("a well-formed graph validates") {
  Graph g = path_graph(4);
  CHECK_NOTHROW(g.validate());
  CHECK(g.num_nodes() == 4);
  CHECK(g.feature_dim() == 3);
  CHECK(g.num_edges() == 3);
  const Eigen::VectorXd deg = g.degrees();
  CHECK(deg(0) == 1.0);
  CHECK(deg(1) == 2.0);
}

TEST_CASE("validation rejects malformed graphs") {
  Graph g = path_graph(3);
  SUBCASE("asymmetric adjacency") {
    g.adjacency(0, 1) = 0.0;
    CHECK_THROWS_AS(g.validate(), gm::DataError);
  }
  SUBCASE("diagonal entry") {
    g.adjacency(1, 1) = 1.0;
    CHECK_THROWS_AS(g.validate(), gm::DataError);
  }
  SUBCASE("non-binary entry") {
    g.adjacency(0, 1) = 0.5;
    g.adjacency(1, 0) = 0.5;
    CHECK_THROWS_AS(g.validate(), gm::DataError);
  }
  SUBCASE("non-finite feature") {
    g.features(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(g.validate(), gm::DataError);
  }
  SUBCASE("coords with the wrong row count") {
    g.coords = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(g.validate(), gm::DataError);
  }
}

TEST_CASE("edges round-trip through the adjacency") {
  Graph g = path_graph(5);
  const auto edges = gm::edges_of(g.adjacency);
  REQUIRE(edges.size() == 4);
  for (const auto& [i, j] : edges) {
    CHECK(i < j);
  }
  const Eigen::MatrixXd back = gm::adjacency_from_edges(5, edges);
  CHECK(back == g.adjacency);
}

TEST_CASE("adjacency_from_edges rejects bad endpoints") {
  CHECK_THROWS_AS(gm::adjacency_from_edges(3, {{0, 3}}), gm::DataError);
  CHECK_THROWS_AS(gm::adjacency_from_edges(3, {{1, 1}}), gm::DataError);
}

TEST_CASE("induced subgraph keeps rows and induced edges") {
  Graph g = path_graph(5);
  g.coords = Eigen::MatrixXd::Random(5, 2);
  const Graph sub = gm::induced_subgraph(g, {1, 2, 4});
  CHECK(sub.num_nodes() == 3);
  CHECK(sub.features(0, 0) == 1.0);
  CHECK(sub.features(1, 0) == 2.0);
  CHECK(sub.features(2, 0) == 4.0);
  // Only the 1-2 edge survives (4 is isolated in the subset).
  CHECK(sub.adjacency(0, 1) == 1.0);
  CHECK(sub.adjacency(0, 2) == 0.0);
  CHECK(sub.adjacency(1, 2) == 0.0);
  REQUIRE(sub.coords.has_value());
  CHECK(sub.coords->row(2) == g.coords->row(4));
}

TEST_CASE("pair validation enforces one-to-one ground truth") {
  GraphPair pair;
  pair.source = path_graph(3);
  pair.target = path_graph(4);
  pair.gt_matching = {{0, 1}, {1, 2}};
  CHECK_NOTHROW(pair.validate());

  SUBCASE("duplicate source node") {
    pair.gt_matching = {{0, 1}, {0, 2}};
    CHECK_THROWS_AS(pair.validate(), gm::DataError);
  }
  SUBCASE("duplicate target node") {
    pair.gt_matching = {{0, 1}, {1, 1}};
    CHECK_THROWS_AS(pair.validate(), gm::DataError);
  }
  SUBCASE("out of range") {
    pair.gt_matching = {{0, 9}};
    CHECK_THROWS_AS(pair.validate(), gm::DataError);
  }
}
