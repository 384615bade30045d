#include "gm/delaunay.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gm/errors.hpp"

namespace gm {

namespace {

// Forward-error bounds for the double-precision predicate filters. When the
// computed determinant is smaller in magnitude than the bound, the sign is
// not certain and the predicate is re-run in exact rational arithmetic.
constexpr double kEps = 0x1.0p-53;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

int orient2d_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  const mpq_class acx = mpq_class(a.x()) - mpq_class(c.x());
  const mpq_class acy = mpq_class(a.y()) - mpq_class(c.y());
  const mpq_class bcx = mpq_class(b.x()) - mpq_class(c.x());
  const mpq_class bcy = mpq_class(b.y()) - mpq_class(c.y());
  const mpq_class det = acx * bcy - acy * bcx;
  return sgn(det);
}

int incircle_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  const mpq_class adx = mpq_class(a.x()) - mpq_class(d.x());
  const mpq_class ady = mpq_class(a.y()) - mpq_class(d.y());
  const mpq_class bdx = mpq_class(b.x()) - mpq_class(d.x());
  const mpq_class bdy = mpq_class(b.y()) - mpq_class(d.y());
  const mpq_class cdx = mpq_class(c.x()) - mpq_class(d.x());
  const mpq_class cdy = mpq_class(c.y()) - mpq_class(d.y());
  const mpq_class alift = adx * adx + ady * ady;
  const mpq_class blift = bdx * bdx + bdy * bdy;
  const mpq_class clift = cdx * cdx + cdy * cdy;
  const mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                        clift * (adx * bdy - bdx * ady);
  return sgn(det);
}

}  // namespace

int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const double detleft = (a.x() - c.x()) * (b.y() - c.y());
  const double detright = (a.y() - c.y()) * (b.x() - c.x());
  const double det = detleft - detright;

  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return sign_of(det);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return sign_of(det);
    detsum = -detleft - detright;
  } else {
    return sign_of(det);
  }
  if (std::abs(det) >= kOrientBound * detsum) return sign_of(det);
  return orient2d_exact(a, b, c);
}

int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                     clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) >= kIncircleBound * permanent) return sign_of(det);
  return incircle_exact(a, b, c, d);
}

namespace {

// Incremental Bowyer-Watson triangulator. The convex hull is closed with
// "ghost" triangles (hull edge plus a symbolic vertex at infinity), so the
// predicates only ever see input coordinates. All triangles are kept
// consistently oriented: real triangles counter-clockwise, a ghost stored as
// (a, b, kGhost) holding the directed edge a->b that is the reverse of the
// hull's counter-clockwise winding.
class Triangulator {
 public:
  static constexpr int kGhost = -1;

  struct Tri {
    int a, b, c;  // c == kGhost for ghost triangles
    bool alive = true;
  };

  explicit Triangulator(const Eigen::MatrixXd& points) : pts_(points) {}

  void run() {
    const int n = static_cast<int>(pts_.rows());
    check_duplicates();

    // Root triangle: points 0 and 1 plus the first point off their line.
    int k = -1;
    for (int i = 2; i < n; ++i) {
      if (orient2d(pt(0), pt(1), pt(i)) != 0) {
        k = i;
        break;
      }
    }
    if (k < 0) throw CollinearInputError("triangulation input points are collinear");

    if (orient2d(pt(0), pt(1), pt(k)) > 0)
      make_root(0, 1, k);
    else
      make_root(1, 0, k);

    for (int i = 2; i < n; ++i) {
      if (i == k) continue;
      insert(i);
    }
  }

  std::vector<std::array<int, 3>> real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
      if (!t.alive || t.c == kGhost) continue;
      std::array<int, 3> tri{t.a, t.b, t.c};
      std::sort(tri.begin(), tri.end());
      out.push_back(tri);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  Eigen::Vector2d pt(int i) const { return pts_.row(i); }

  void check_duplicates() const {
    const int n = static_cast<int>(pts_.rows());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      if (pts_(i, 0) != pts_(j, 0)) return pts_(i, 0) < pts_(j, 0);
      return pts_(i, 1) < pts_(j, 1);
    });
    for (int i = 0; i + 1 < n; ++i) {
      const int p = order[i], q = order[i + 1];
      if (pts_(p, 0) == pts_(q, 0) && pts_(p, 1) == pts_(q, 1))
        throw DuplicatePointError("triangulation input contains identical points");
    }
  }

  void make_root(int a, int b, int c) {
    tris_.push_back({a, b, c});
    tris_.push_back({b, a, kGhost});
    tris_.push_back({c, b, kGhost});
    tris_.push_back({a, c, kGhost});
  }

  bool conflicts(const Tri& t, int d) const {
    if (t.c == kGhost) {
      const int o = orient2d(pt(t.a), pt(t.b), pt(d));
      if (o != 0) return o > 0;  // strictly outside the hull across this edge
      return on_open_segment(t.a, t.b, d);
    }
    return incircle(pt(t.a), pt(t.b), pt(t.c), pt(d)) > 0;
  }

  // Point d known collinear with (a, b): is it strictly between them?
  bool on_open_segment(int a, int b, int d) const {
    const double ax = pts_(a, 0), bx = pts_(b, 0), dx = pts_(d, 0);
    if (ax != bx) return (std::min(ax, bx) < dx) && (dx < std::max(ax, bx));
    const double ay = pts_(a, 1), by = pts_(b, 1), dy = pts_(d, 1);
    return (std::min(ay, by) < dy) && (dy < std::max(ay, by));
  }

  std::array<std::pair<int, int>, 3> directed_edges(const Tri& t) const {
    return {{{t.a, t.b}, {t.b, t.c}, {t.c, t.a}}};
  }

  int tri_with_directed_edge(int u, int v) const {
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      for (const auto& [p, q] : directed_edges(tris_[i]))
        if (p == u && q == v) return i;
    }
    throw NumericError("triangulation invariant broken: missing twin edge");
  }

  void insert(int d) {
    std::vector<int> cavity;
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i)
      if (tris_[i].alive && conflicts(tris_[i], d)) cavity.push_back(i);
    if (cavity.empty()) throw NumericError("triangulation invariant broken: empty cavity");

    // Boundary of the cavity = directed edges whose reverse lies outside it.
    // A boundary edge collinear with d would create a degenerate triangle, so
    // its outside neighbour (a cocircular / collinear tie) is pulled into the
    // cavity and the boundary recomputed.
    std::vector<std::pair<int, int>> boundary;
    for (;;) {
      boundary.clear();
      auto inside = [&](int u, int v) {
        for (int ci : cavity)
          for (const auto& [p, q] : directed_edges(tris_[ci]))
            if (p == u && q == v) return true;
        return false;
      };
      for (int ci : cavity)
        for (const auto& [p, q] : directed_edges(tris_[ci]))
          if (!inside(q, p)) boundary.emplace_back(p, q);

      int degenerate = -1;
      for (const auto& [u, v] : boundary) {
        if (u != kGhost && v != kGhost && orient2d(pt(u), pt(v), pt(d)) == 0) {
          degenerate = tri_with_directed_edge(v, u);
          break;
        }
      }
      if (degenerate < 0) break;
      cavity.push_back(degenerate);
    }

    for (int ci : cavity) tris_[ci].alive = false;
    for (const auto& [u, v] : boundary) {
      if (u == kGhost)
        tris_.push_back({v, d, kGhost});
      else if (v == kGhost)
        tris_.push_back({d, u, kGhost});
      else
        tris_.push_back({u, v, d});
    }
  }

  const Eigen::MatrixXd& pts_;
  std::vector<Tri> tris_;
};

void check_input(const Eigen::MatrixXd& points) {
  if (points.cols() != 2) throw DataError("triangulation input must be N x 2");
  if (points.rows() < 3)
    throw TooFewPointsError("triangulation needs at least 3 points, got " +
                            std::to_string(points.rows()));
  if (!points.allFinite()) throw DataError("triangulation input has non-finite coordinates");
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangles(const Eigen::MatrixXd& points) {
  check_input(points);
  Triangulator tr(points);
  tr.run();
  return tr.real_triangles();
}

Eigen::MatrixXd delaunay_triangulate(const Eigen::MatrixXd& points) {
  const auto tris = delaunay_triangles(points);
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : tris) {
    adj(t[0], t[1]) = adj(t[1], t[0]) = 1.0;
    adj(t[1], t[2]) = adj(t[2], t[1]) = 1.0;
    adj(t[0], t[2]) = adj(t[2], t[0]) = 1.0;
  }
  return adj;
}

}  // namespace gm
