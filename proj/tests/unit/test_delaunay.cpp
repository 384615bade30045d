#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "gm/delaunay.hpp"
#include "gm/errors.hpp"
#include "gm/graph.hpp"
#include "gm/rng.hpp"

namespace {

Eigen::Vector2d row(const Eigen::MatrixXd& pts, int i) { return pts.row(i); }

// Convex-hull vertex count by gift wrapping (collinear hull points skipped),
// used as an independent check of the triangle count via Euler's formula.
int hull_vertex_count(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  int start = 0;
  for (int i = 1; i < n; ++i) {
    if (pts(i, 0) < pts(start, 0) ||
        (pts(i, 0) == pts(start, 0) && pts(i, 1) < pts(start, 1))) {
      start = i;
    }
  }
  int count = 0;
  int cur = start;
  do {
    count += 1;
    int next = (cur + 1) % n;
    for (int cand = 0; cand < n; ++cand) {
      if (cand == cur) continue;
      const int o = gm::orient2d(row(pts, cur), row(pts, next), row(pts, cand));
      if (o < 0) {
        next = cand;
      } else if (o == 0) {
        // Prefer the farther collinear point so straight hull stretches
        // count a single vertex per corner.
        const double d_next = (pts.row(next) - pts.row(cur)).squaredNorm();
        const double d_cand = (pts.row(cand) - pts.row(cur)).squaredNorm();
        if (d_cand > d_next) next = cand;
      }
    }
    cur = next;
  } while (cur != start && count <= n);
  return count;
}

double triangle_area(const Eigen::MatrixXd& pts, const std::array<int, 3>& t) {
  const Eigen::Vector2d a = row(pts, t[0]);
  const Eigen::Vector2d b = row(pts, t[1]);
  const Eigen::Vector2d c = row(pts, t[2]);
  return 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) -
                        (c.x() - a.x()) * (b.y() - a.y()));
}

double hull_area(const Eigen::MatrixXd& pts) {
  // Monotone-chain hull, then the shoelace formula.
  const int n = static_cast<int>(pts.rows());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&pts](int a, int b) {
    return pts(a, 0) < pts(b, 0) || (pts(a, 0) == pts(b, 0) && pts(a, 1) < pts(b, 1));
  });
  std::vector<int> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (int i : idx) {
      while (hull.size() >= base + 2 &&
             gm::orient2d(row(pts, hull[hull.size() - 2]),
                          row(pts, hull[hull.size() - 1]), row(pts, i)) <= 0) {
        hull.pop_back();
      }
      hull.push_back(i);
    }
    hull.pop_back();
    std::reverse(idx.begin(), idx.end());
  }
  double twice_area = 0.0;
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const Eigen::Vector2d a = row(pts, hull[k]);
    const Eigen::Vector2d b = row(pts, hull[(k + 1) % hull.size()]);
    twice_area += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * std::abs(twice_area);
}

// The full oracle: every triangle is positively oriented and empty
// (brute force over all other points), the triangle count obeys Euler's
// formula for a triangulation of the hull, the covered area equals the hull
// area, and the adjacency matches the triangle edges.
void check_is_delaunay(const Eigen::MatrixXd& pts) {
  const auto tris = gm::delaunay_triangles(pts);
  const int n = static_cast<int>(pts.rows());
  REQUIRE(!tris.empty());

  for (const auto& t : tris) {
    Eigen::Vector2d a = row(pts, t[0]);
    Eigen::Vector2d b = row(pts, t[1]);
    Eigen::Vector2d c = row(pts, t[2]);
    int orient = gm::orient2d(a, b, c);
    REQUIRE(orient != 0);
    if (orient < 0) {
      std::swap(b, c);
    }
    for (int d = 0; d < n; ++d) {
      if (d == t[0] || d == t[1] || d == t[2]) continue;
      // Strictly inside the circumcircle is a Delaunay violation; exactly
      // on the circle (cocircular tie) is fine.
      CHECK(gm::incircle(a, b, c, row(pts, d)) <= 0);
    }
  }

  const int h = hull_vertex_count(pts);
  CHECK(static_cast<int>(tris.size()) == 2 * n - 2 - h);

  double covered = 0.0;
  for (const auto& t : tris) covered += triangle_area(pts, t);
  CHECK(covered == doctest::Approx(hull_area(pts)).epsilon(1e-9));

  // The adjacency is exactly the union of the triangle edges.
  const Eigen::MatrixXd adj = gm::delaunay_triangulate(pts);
  std::set<std::pair<int, int>> tri_edges;
  for (const auto& t : tris) {
    tri_edges.insert({std::min(t[0], t[1]), std::max(t[0], t[1])});
    tri_edges.insert({std::min(t[0], t[2]), std::max(t[0], t[2])});
    tri_edges.insert({std::min(t[1], t[2]), std::max(t[1], t[2])});
  }
  std::set<std::pair<int, int>> adj_edges;
  for (const auto& e : gm::edges_of(adj)) adj_edges.insert(e);
  CHECK(tri_edges == adj_edges);
}

}  // namespace

TEST_CASE("orientation predicate signs") {
  const Eigen::Vector2d a(0, 0), b(1, 0), c(0, 1);
  CHECK(gm::orient2d(a, b, c) == 1);
  CHECK(gm::orient2d(a, c, b) == -1);
  CHECK(gm::orient2d(a, b, Eigen::Vector2d(2, 0)) == 0);
  // Tiny perturbations far below double noise still get the exact sign.
  const Eigen::Vector2d almost(2.0, 1e-30);
  CHECK(gm::orient2d(a, b, almost) == 1);
}

TEST_CASE("incircle predicate signs") {
  const Eigen::Vector2d a(0, 0), b(1, 0), c(0, 1);
  CHECK(gm::incircle(a, b, c, Eigen::Vector2d(0.25, 0.25)) == 1);
  CHECK(gm::incircle(a, b, c, Eigen::Vector2d(5, 5)) == -1);
  CHECK(gm::incircle(a, b, c, Eigen::Vector2d(1, 1)) == 0);  // cocircular
}

TEST_CASE("triangle and square basics") {
  Eigen::MatrixXd tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  const auto tris = gm::delaunay_triangles(tri);
  REQUIRE(tris.size() == 1);
  CHECK(tris[0] == std::array<int, 3>{0, 1, 2});

  Eigen::MatrixXd square(4, 2);
  square << 0, 0, 1, 0, 1, 1, 0, 1;
  const auto sq = gm::delaunay_triangles(square);
  CHECK(sq.size() == 2);  // cocircular tie: either diagonal is Delaunay
  const Eigen::MatrixXd adj = gm::delaunay_triangulate(square);
  int edges = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) edges += adj(i, j) > 0 ? 1 : 0;
  }
  CHECK(edges == 5);  // four sides plus one diagonal
}

TEST_CASE("error contract") {
  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 1, 1;
  CHECK_THROWS_AS(gm::delaunay_triangulate(two), gm::TooFewPointsError);

  Eigen::MatrixXd collinear(4, 2);
  collinear << 0, 0, 1, 1, 2, 2, 3, 3;
  CHECK_THROWS_AS(gm::delaunay_triangulate(collinear), gm::CollinearInputError);

  Eigen::MatrixXd dup(4, 2);
  dup << 0, 0, 1, 0, 0, 1, 1, 0;
  CHECK_THROWS_AS(gm::delaunay_triangulate(dup), gm::DuplicatePointError);
}

TEST_CASE("random point sets satisfy the brute-force empty-circle oracle") {
  for (int trial = 0; trial < 40; ++trial) {
    gm::Rng rng(1000 + trial);
    const int n = 3 + static_cast<int>(rng.below(23));
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
      pts(i, 0) = rng.uniform01();
      pts(i, 1) = rng.uniform01();
    }
    CAPTURE(trial);
    CAPTURE(n);
    check_is_delaunay(pts);
  }
}

TEST_CASE("the edge set is invariant under input permutation") {
  gm::Rng rng(99);
  const int n = 14;
  Eigen::MatrixXd pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform01();
    pts(i, 1) = rng.uniform01();
  }
  const Eigen::MatrixXd adj = gm::delaunay_triangulate(pts);

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);
  Eigen::MatrixXd shuffled(n, 2);
  for (int i = 0; i < n; ++i) shuffled.row(i) = pts.row(perm[i]);
  const Eigen::MatrixXd adj2 = gm::delaunay_triangulate(shuffled);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      CHECK(adj(perm[i], perm[j]) == adj2(i, j));
    }
  }
}

TEST_CASE("structured degenerate inputs stay valid") {
  SUBCASE("3x3 grid with many cocircular quadruples") {
    Eigen::MatrixXd pts(9, 2);
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        pts(k, 0) = i;
        pts(k, 1) = j;
        ++k;
      }
    }
    check_is_delaunay(pts);
  }
  SUBCASE("points on a circle: all cocircular") {
    const int n = 8;
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
      pts(i, 0) = std::cos(2 * M_PI * i / n);
      pts(i, 1) = std::sin(2 * M_PI * i / n);
    }
    check_is_delaunay(pts);
  }
  SUBCASE("nearly collinear band") {
    const int n = 9;
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
      pts(i, 0) = static_cast<double>(i);
      pts(i, 1) = 1e-9 * static_cast<double>(i) * i;
    }
    check_is_delaunay(pts);
  }
}
