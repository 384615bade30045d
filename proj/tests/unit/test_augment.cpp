#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "gm/augment.hpp"
#include "gm/delaunay.hpp"
#include "gm/errors.hpp"
#include "gm/graph.hpp"
#include "gm/rng.hpp"

namespace {

gm::Graph random_graph(std::uint64_t seed, int n, int f) {
  gm::Rng rng(seed);
  Eigen::MatrixXd coords(n, 2);
  for (int i = 0; i < n; ++i) {
    coords(i, 0) = rng.uniform01();
    coords(i, 1) = rng.uniform01();
  }
  gm::Graph g;
  g.coords = coords;
  g.adjacency = gm::delaunay_triangulate(coords);
  g.features = Eigen::MatrixXd(n, f);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < f; ++j) g.features(i, j) = rng.normal();
  g.graph_id = "test";
  g.class_id = 0;
  return g;
}

// A representative valid spec for each kind.
gm::AugSpec spec_for(gm::AugKind kind) {
  gm::AugSpec s;
  s.kind = kind;
  switch (kind) {
    case gm::AugKind::Identity:
      break;
    case gm::AugKind::NodeInsertion:
    case gm::AugKind::NodeReplacement:
      s.fraction = 0.3;
      s.subset_size = 3;
      s.aggregator = gm::Aggregator::Mean;
      s.edges_per_dummy = 2;
      break;
    case gm::AugKind::EdgeRemoval:
    case gm::AugKind::NodeDropping:
    case gm::AugKind::FeatureMasking:
      s.fraction = 0.3;
      break;
    case gm::AugKind::FeatureScaleUnivariate:
    case gm::AugKind::FeatureScaleMultivariate:
      s.scale_lo = 0.5;
      s.scale_hi = 1.5;
      break;
    case gm::AugKind::Mixup:
      s.mix = 0.4;
      break;
  }
  return s;
}

const gm::AugKind kAllKinds[] = {
    gm::AugKind::Identity,
    gm::AugKind::NodeInsertion,
    gm::AugKind::NodeReplacement,
    gm::AugKind::EdgeRemoval,
    gm::AugKind::FeatureScaleUnivariate,
    gm::AugKind::FeatureScaleMultivariate,
    gm::AugKind::NodeDropping,
    gm::AugKind::FeatureMasking,
    gm::AugKind::Mixup,
};

// Reconstructs the expected origin map purely from the edit trace: survivors
// (originals not removed) in increasing order, then one undefined entry per
// appended dummy.
std::vector<std::optional<int>> origins_from_trace(int n_original, const gm::AugTrace& tr) {
  std::vector<std::optional<int>> expect;
  for (int v = 0; v < n_original; ++v) {
    if (!std::binary_search(tr.removed_originals.begin(), tr.removed_originals.end(), v))
      expect.emplace_back(v);
  }
  for (int d = 0; d < tr.dummies_appended; ++d) expect.emplace_back(std::nullopt);
  return expect;
}

}  // namespace

TEST_CASE("spec validation boundaries") {
  gm::AugSpec s;
  SUBCASE("fraction range") {
    s.kind = gm::AugKind::EdgeRemoval;
    s.fraction = 0.05;
    CHECK_THROWS_AS(s.validate(), gm::InvalidSpecError);
    s.fraction = 0.95;
    CHECK_THROWS_AS(s.validate(), gm::InvalidSpecError);
    s.fraction = 0.1;
    CHECK_NOTHROW(s.validate());
    s.fraction = 0.9;
    CHECK_NOTHROW(s.validate());
  }
  SUBCASE("dummy parameters") {
    s = spec_for(gm::AugKind::NodeInsertion);
    s.subset_size = 1;
    CHECK_THROWS_AS(s.validate(), gm::InvalidSpecError);
    s = spec_for(gm::AugKind::NodeReplacement);
    s.edges_per_dummy = 0;
    CHECK_THROWS_AS(s.validate(), gm::InvalidSpecError);
  }
  SUBCASE("scale bounds") {
    s = spec_for(gm::AugKind::FeatureScaleUnivariate);
    s.scale_lo = 0.1;
    CHECK_THROWS_AS(s.validate(), gm::InvalidSpecError);
    s = spec_for(gm::AugKind::FeatureScaleMultivariate);
    s.scale_hi = 2.0;
    CHECK_THROWS_AS(s.validate(), gm::InvalidSpecError);
  }
  SUBCASE("mixup coefficient") {
    s = spec_for(gm::AugKind::Mixup);
    s.mix = 0.0;
    CHECK_THROWS_AS(s.validate(), gm::InvalidSpecError);
  }
}

TEST_CASE("kind names round-trip") {
  for (gm::AugKind k : kAllKinds) {
    CHECK(gm::aug_kind_from_name(gm::aug_kind_name(k)) == k);
  }
  CHECK_THROWS_AS(gm::aug_kind_from_name("bogus"), gm::InvalidSpecError);
}

TEST_CASE("spec JSON round-trip") {
  for (gm::AugKind k : kAllKinds) {
    const gm::AugSpec s = spec_for(k);
    const gm::AugSpec back = gm::aug_spec_from_json(gm::aug_spec_to_json(s));
    CHECK(back.kind == s.kind);
    CHECK(back.fraction == s.fraction);
    CHECK(back.subset_size == s.subset_size);
    CHECK(back.aggregator == s.aggregator);
    CHECK(back.edges_per_dummy == s.edges_per_dummy);
    CHECK(back.scale_lo == s.scale_lo);
    CHECK(back.scale_hi == s.scale_hi);
    CHECK(back.mix == s.mix);
  }
}

TEST_CASE("every kind produces a valid view and a trace-consistent origin map") {
  for (gm::AugKind k : kAllKinds) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CAPTURE(gm::aug_kind_name(k));
      CAPTURE(seed);
      const gm::Graph g = random_graph(100 + seed, 12, 6);
      gm::Rng rng(seed);
      gm::AugTrace trace;
      const gm::AugmentedView view = gm::apply(spec_for(k), g, rng, &trace);

      CHECK_NOTHROW(view.graph.validate());
      REQUIRE(view.origin_of.size() == static_cast<std::size_t>(view.graph.num_nodes()));

      // Origin map must match the one rebuilt from the structural-edit trace.
      const auto expect = origins_from_trace(g.num_nodes(), trace);
      REQUIRE(expect.size() == view.origin_of.size());
      for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(view.origin_of[i] == expect[i]);
      }

      // Injectivity over defined origins.
      std::set<int> seen;
      for (const auto& o : view.origin_of) {
        if (!o) continue;
        CHECK(seen.insert(*o).second);
        CHECK(*o >= 0);
        CHECK(*o < g.num_nodes());
      }

      // Feature rows of surviving nodes are tied to their originals for the
      // structure-editing kinds (which never touch surviving features).
      if (k == gm::AugKind::NodeReplacement || k == gm::AugKind::NodeDropping ||
          k == gm::AugKind::NodeInsertion || k == gm::AugKind::Identity ||
          k == gm::AugKind::EdgeRemoval) {
        for (std::size_t i = 0; i < view.origin_of.size(); ++i) {
          if (view.origin_of[i])
            CHECK(view.graph.features.row(static_cast<int>(i)) ==
                  g.features.row(*view.origin_of[i]));
        }
      }
    }
  }
}

TEST_CASE("application is deterministic in the stream state") {
  for (gm::AugKind k : kAllKinds) {
    const gm::Graph g = random_graph(7, 10, 4);
    gm::Rng r1(123), r2(123);
    const gm::AugmentedView a = gm::apply(spec_for(k), g, r1);
    const gm::AugmentedView b = gm::apply(spec_for(k), g, r2);
    CHECK(a.graph.features == b.graph.features);
    CHECK(a.graph.adjacency == b.graph.adjacency);
    CHECK(a.origin_of == b.origin_of);
  }
}

TEST_CASE("dummy count follows the ceiling rule") {
  const gm::Graph g = random_graph(5, 10, 4);
  auto dummies_for = [&g](double fraction) {
    gm::AugSpec s = spec_for(gm::AugKind::NodeInsertion);
    s.fraction = fraction;
    gm::Rng rng(1);
    gm::AugTrace tr;
    gm::apply(s, g, rng, &tr);
    return tr.dummies_appended;
  };
  CHECK(dummies_for(0.3) == 3);   // exact product stays exact
  CHECK(dummies_for(0.25) == 3);  // 2.5 rounds up
  CHECK(dummies_for(0.1) == 1);
  CHECK(dummies_for(0.11) == 2);  // 1.1 rounds up
}

TEST_CASE("node insertion mechanics") {
  const gm::Graph g = random_graph(11, 10, 4);
  gm::AugSpec s = spec_for(gm::AugKind::NodeInsertion);
  s.fraction = 0.3;
  s.edges_per_dummy = 2;
  gm::Rng rng(2);
  const gm::AugmentedView view = gm::apply(s, g, rng);
  const int n = g.num_nodes();
  REQUIRE(view.graph.num_nodes() == n + 3);

  // Base block is untouched; dummies never connect to each other; each dummy
  // has exactly edges_per_dummy attachments (enough candidates here); the
  // view loses coordinates because dummies have no position.
  CHECK(view.graph.adjacency.topLeftCorner(n, n) == g.adjacency);
  for (int d = n; d < n + 3; ++d) {
    for (int e = n; e < n + 3; ++e) CHECK(view.graph.adjacency(d, e) == 0.0);
    CHECK(view.graph.adjacency.row(d).sum() == doctest::Approx(2.0));
  }
  CHECK(!view.graph.coords.has_value());

  // Mean-aggregated dummy features stay inside the per-column range of the
  // base features.
  for (int d = n; d < n + 3; ++d) {
    for (int c = 0; c < g.feature_dim(); ++c) {
      CHECK(view.graph.features(d, c) >= g.features.col(c).minCoeff() - 1e-12);
      CHECK(view.graph.features(d, c) <= g.features.col(c).maxCoeff() + 1e-12);
    }
  }
}

TEST_CASE("node replacement keeps at least one survivor") {
  const gm::Graph g = random_graph(21, 5, 3);
  gm::AugSpec s = spec_for(gm::AugKind::NodeReplacement);
  s.fraction = 0.9;  // would remove ceil(4.5) = 5 of 5; clamp keeps one
  gm::Rng rng(3);
  gm::AugTrace tr;
  const gm::AugmentedView view = gm::apply(s, g, rng, &tr);
  CHECK(static_cast<int>(tr.removed_originals.size()) == 4);
  CHECK(view.graph.num_nodes() == 5);  // 1 survivor + 4 dummies
  int defined = 0;
  for (const auto& o : view.origin_of) defined += o.has_value();
  CHECK(defined == 1);
}

TEST_CASE("edge removal matches a per-edge coin with the spec fraction") {
  const gm::Graph g = random_graph(31, 20, 3);
  const int m = g.num_edges();
  gm::AugSpec s = spec_for(gm::AugKind::EdgeRemoval);
  s.fraction = 0.5;
  const int trials = 400;
  long long removed_total = 0;
  gm::Rng rng(4);
  for (int t = 0; t < trials; ++t) {
    const gm::AugmentedView view = gm::apply(s, g, rng);
    removed_total += m - view.graph.num_edges();
    // Removal only: every surviving edge existed before.
    CHECK(((g.adjacency - view.graph.adjacency).array() >= -1e-15).all());
  }
  const double n_coins = static_cast<double>(trials) * m;
  const double mean = n_coins * s.fraction;
  const double sigma = std::sqrt(n_coins * s.fraction * (1 - s.fraction));
  CHECK(std::abs(removed_total - mean) <= 5 * sigma);
}

TEST_CASE("feature scaling stays inside the draw interval") {
  const gm::Graph g = random_graph(41, 8, 5);
  SUBCASE("univariate: one scalar per node") {
    gm::Rng rng(5);
    const gm::AugmentedView view = gm::apply(spec_for(gm::AugKind::FeatureScaleUnivariate), g, rng);
    for (int v = 0; v < g.num_nodes(); ++v) {
      // Recover the per-row scalar from the first nonzero entry and check the
      // whole row matches it.
      int ref = 0;
      while (std::abs(g.features(v, ref)) < 1e-9) ++ref;
      const double scale = view.graph.features(v, ref) / g.features(v, ref);
      CHECK(scale >= 0.5);
      CHECK(scale < 1.5);
      CHECK((view.graph.features.row(v) - scale * g.features.row(v)).norm() < 1e-12);
    }
  }
  SUBCASE("multivariate: one scalar per entry") {
    gm::Rng rng(6);
    const gm::AugmentedView view =
        gm::apply(spec_for(gm::AugKind::FeatureScaleMultivariate), g, rng);
    bool any_differ_within_row = false;
    for (int v = 0; v < g.num_nodes(); ++v) {
      double first_ratio = 0.0;
      for (int c = 0; c < g.feature_dim(); ++c) {
        const double ratio = view.graph.features(v, c) / g.features(v, c);
        CHECK(ratio >= 0.5);
        CHECK(ratio < 1.5);
        if (c == 0)
          first_ratio = ratio;
        else if (std::abs(ratio - first_ratio) > 1e-9)
          any_differ_within_row = true;
      }
    }
    CHECK(any_differ_within_row);
  }
}

TEST_CASE("feature masking zeroes whole columns and nothing else") {
  const gm::Graph g = random_graph(51, 9, 12);
  gm::Rng rng(7);
  const gm::AugmentedView view = gm::apply(spec_for(gm::AugKind::FeatureMasking), g, rng);
  int masked = 0;
  for (int c = 0; c < g.feature_dim(); ++c) {
    if (view.graph.features.col(c).isZero(0.0)) {
      ++masked;
    } else {
      CHECK(view.graph.features.col(c) == g.features.col(c));
    }
  }
  CHECK(masked >= 1);  // seed chosen so at least one column is hit
  CHECK(masked < g.feature_dim());
}

TEST_CASE("mixup blends every row toward the feature mean") {
  const gm::Graph g = random_graph(61, 7, 4);
  gm::AugSpec s = spec_for(gm::AugKind::Mixup);
  gm::Rng rng(8);
  const gm::AugmentedView view = gm::apply(s, g, rng);
  const Eigen::RowVectorXd mean = g.features.colwise().mean();
  for (int v = 0; v < g.num_nodes(); ++v) {
    const Eigen::RowVectorXd expect = (1.0 - s.mix) * g.features.row(v) + s.mix * mean;
    CHECK((view.graph.features.row(v) - expect).norm() < 1e-12);
  }
  // Column means are preserved by the blend.
  CHECK((view.graph.features.colwise().mean() - mean).norm() < 1e-12);
}

TEST_CASE("node dropping keeps an induced subgraph with coordinates") {
  const gm::Graph g = random_graph(71, 12, 4);
  gm::Rng rng(9);
  gm::AugTrace tr;
  const gm::AugmentedView view = gm::apply(spec_for(gm::AugKind::NodeDropping), g, rng, &tr);
  REQUIRE(view.graph.num_nodes() >= 1);
  CHECK(view.graph.coords.has_value());
  for (std::size_t i = 0; i < view.origin_of.size(); ++i) {
    REQUIRE(view.origin_of[i].has_value());
    const int o = *view.origin_of[i];
    CHECK(view.graph.coords->row(static_cast<int>(i)) == g.coords->row(o));
    for (std::size_t j = 0; j < view.origin_of.size(); ++j) {
      CHECK(view.graph.adjacency(i, j) == g.adjacency(o, *view.origin_of[j]));
    }
  }
}

TEST_CASE("self ground truth is a valid partial permutation on shared origins") {
  int checked_pairs = 0;
  for (gm::AugKind ka : kAllKinds) {
    for (gm::AugKind kb : kAllKinds) {
      const std::uint64_t seed = static_cast<std::uint64_t>(checked_pairs++);
      const gm::Graph g = random_graph(200 + seed, 11, 5);
      gm::Rng ra(seed * 2 + 1), rb(seed * 3 + 1);
      gm::AugTrace ta, tb;
      const gm::AugmentedView va = gm::apply(spec_for(ka), g, ra, &ta);
      const gm::AugmentedView vb = gm::apply(spec_for(kb), g, rb, &tb);
      const Eigen::MatrixXd gt = gm::self_ground_truth(va, vb);

      REQUIRE(gt.rows() == va.graph.num_nodes());
      REQUIRE(gt.cols() == vb.graph.num_nodes());
      CHECK(((gt.array() == 0.0) || (gt.array() == 1.0)).all());
      for (int i = 0; i < gt.rows(); ++i) CHECK(gt.row(i).sum() <= 1.0);
      for (int j = 0; j < gt.cols(); ++j) CHECK(gt.col(j).sum() <= 1.0);

      // Independent oracle from the traces: original o is matched iff it
      // survived both views, at the positions given by survivor ranks.
      Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(gt.rows(), gt.cols());
      const auto oa = origins_from_trace(g.num_nodes(), ta);
      const auto ob = origins_from_trace(g.num_nodes(), tb);
      for (int o = 0; o < g.num_nodes(); ++o) {
        int i = -1, j = -1;
        for (std::size_t r = 0; r < oa.size(); ++r)
          if (oa[r] && *oa[r] == o) i = static_cast<int>(r);
        for (std::size_t c = 0; c < ob.size(); ++c)
          if (ob[c] && *ob[c] == o) j = static_cast<int>(c);
        if (i >= 0 && j >= 0) expect(i, j) = 1.0;
      }
      CHECK(gt == expect);

      // Pair list agrees with the matrix.
      const auto pairs = gm::correspondence_pairs(va, vb);
      CHECK(static_cast<double>(pairs.size()) == gt.sum());
      for (const auto& [i, j] : pairs) CHECK(gt(i, j) == 1.0);
    }
  }
  CHECK(checked_pairs == 81);
}
