#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace gm {

// Sign of the orientation determinant of the triangle (a, b, c):
// +1 counter-clockwise, -1 clockwise, 0 exactly collinear. Exact: a double
// evaluation is certified with a forward error bound and falls back to
// rational arithmetic when inconclusive.
int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

// Sign of the in-circle determinant: for a counter-clockwise triangle
// (a, b, c), +1 when d lies strictly inside its circumcircle, -1 strictly
// outside, 0 exactly on it. Exact via the same filtered scheme.
int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d);

// Delaunay triangulation of N points (rows of an N x 2 matrix), returned as
// the triangulation's symmetric 0/1 adjacency matrix. Throws
// TooFewPointsError (N < 3), DuplicatePointError (two identical rows), or
// CollinearInputError (all points on one line). Cocircular ties are resolved
// deterministically by insertion order.
Eigen::MatrixXd delaunay_triangulate(const Eigen::MatrixXd& points);

// The triangles of the triangulation (each a sorted index triple, the list
// sorted lexicographically). Same error contract as delaunay_triangulate.
std::vector<std::array<int, 3>> delaunay_triangles(const Eigen::MatrixXd& points);

}  // namespace gm
