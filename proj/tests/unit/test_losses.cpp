#include <doctest.h>

#include <cmath>
#include <vector>

#include "gm/autodiff.hpp"
#include "gm/errors.hpp"
#include "gm/losses.hpp"
#include "gm/rng.hpp"

#include "grad_check.hpp"

namespace {

Eigen::MatrixXd random_matrix(gm::Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

double contrastive_value(const Eigen::MatrixXd& za, const Eigen::MatrixXd& zb,
                         const std::vector<std::pair<int, int>>& corr, double temperature) {
  gm::ad::Tape tape;
  const auto va = tape.leaf(za), vb = tape.leaf(zb);
  return tape.value(gm::node_contrastive_loss(tape, va, vb, corr, temperature))(0, 0);
}

double matching_value(const Eigen::MatrixXd& g_hat, const Eigen::MatrixXd& g_self,
                      const gm::LossConfig& cfg) {
  gm::ad::Tape tape;
  const auto v = tape.leaf(g_hat);
  return tape.value(gm::matching_loss(tape, v, g_self, cfg))(0, 0);
}

}  // namespace

TEST_CASE("loss config validation and JSON round-trip") {
  gm::LossConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.temperature = 0.0;
  CHECK_THROWS_AS(cfg.validate(), gm::ConfigError);

  cfg.temperature = 0.3;
  cfg.matching_loss_kind = gm::MatchingLossKind::Hamming;
  cfg.permutation_balanced = false;
  const gm::LossConfig back = gm::loss_config_from_json(gm::loss_config_to_json(cfg));
  CHECK(back.temperature == cfg.temperature);
  CHECK(back.matching_loss_kind == cfg.matching_loss_kind);
  CHECK(back.permutation_balanced == cfg.permutation_balanced);

  CHECK(gm::matching_loss_kind_from_name("permutation") == gm::MatchingLossKind::Permutation);
  CHECK(gm::matching_loss_kind_from_name("hamming") == gm::MatchingLossKind::Hamming);
  CHECK_THROWS_AS(gm::matching_loss_kind_from_name("dice"), gm::ConfigError);
}

TEST_CASE("cosine similarity conventions") {
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  CHECK(gm::cosine_similarity(a, a) == doctest::Approx(1.0));
  CHECK(gm::cosine_similarity(a, b) == doctest::Approx(0.0));
  CHECK(gm::cosine_similarity(a, (-a).eval()) == doctest::Approx(-1.0));
  Eigen::VectorXd scaled = 7.5 * a;
  CHECK(gm::cosine_similarity(scaled, a) == doctest::Approx(1.0));
  // Zero vectors are treated as orthogonal to everything.
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK(gm::cosine_similarity(zero, a) == 0.0);
  CHECK(gm::cosine_similarity(zero, zero) == 0.0);
}

TEST_CASE("intra and inter term worked examples at temperature 1") {
  Eigen::MatrixXd z(2, 2);
  z << 1, 0, 0, 1;  // orthogonal rows
  CHECK(gm::intra_term(z, 0, 1.0) == doctest::Approx(1.0));  // exp(0)

  Eigen::MatrixXd same(2, 2);
  same << 1, 0, 2, 0;  // parallel rows: cos = 1
  CHECK(gm::intra_term(same, 0, 1.0) == doctest::Approx(std::exp(1.0)));

  Eigen::MatrixXd opp(2, 2);
  opp << 1, 0, -3, 0;  // opposite rows: cos = -1
  CHECK(gm::intra_term(opp, 0, 1.0) == doctest::Approx(std::exp(-1.0)));

  // Single row: the intra sum is empty.
  Eigen::MatrixXd solo(1, 2);
  solo << 1, 0;
  CHECK(gm::intra_term(solo, 0, 1.0) == 0.0);

  // Inter sum includes the aligned positive: e + 1 = 3.71828...
  CHECK(gm::inter_term(z, z, 0, 1.0) == doctest::Approx(std::exp(1.0) + 1.0));
  CHECK(gm::inter_term(z, z, 0, 1.0) == doctest::Approx(3.71828).epsilon(1e-5));

  // Temperature scales the logits before exponentiation.
  CHECK(gm::inter_term(z, z, 0, 0.5) == doctest::Approx(std::exp(2.0) + 1.0));
}

TEST_CASE("contrastive loss on identity-aligned orthogonal embeddings") {
  // Both views are the 2x2 identity; each anchor's positive is itself.
  // Per anchor: -log(e / (e + 2)) = 0.551445...; all four anchors identical.
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2, 2);
  const std::vector<std::pair<int, int>> corr = {{0, 0}, {1, 1}};
  const double loss = contrastive_value(z, z, corr, 1.0);
  const double per_anchor = -std::log(std::exp(1.0) / (std::exp(1.0) + 2.0));
  CHECK(loss == doctest::Approx(per_anchor).epsilon(1e-12));
  CHECK(loss == doctest::Approx(0.55145).epsilon(1e-4));

  // Agreement with the plain-matrix reference terms, anchor by anchor.
  double reference = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double pos = std::exp(gm::cosine_similarity(z.row(i), z.row(i)) / 1.0);
    reference += -std::log(pos / (gm::intra_term(z, i, 1.0) + gm::inter_term(z, z, i, 1.0)));
  }
  reference *= 2.0;  // B side is symmetric here
  CHECK(loss == doctest::Approx(reference / 4.0).epsilon(1e-12));
}

TEST_CASE("contrastive loss is symmetric under swapping the two views") {
  gm::Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd za = random_matrix(rng, 5, 4);
    const Eigen::MatrixXd zb = random_matrix(rng, 3, 4);
    const std::vector<std::pair<int, int>> corr = {{0, 1}, {2, 0}, {4, 2}};
    std::vector<std::pair<int, int>> swapped;
    for (const auto& [i, j] : corr) swapped.emplace_back(j, i);
    const double fwd = contrastive_value(za, zb, corr, 0.5);
    const double bwd = contrastive_value(zb, za, swapped, 0.5);
    CHECK(std::abs(fwd - bwd) <= 1e-12);
    CHECK(fwd > 0.0);  // softmax over >1 candidate is never certain
  }
}

TEST_CASE("anchors without positives are excluded but still dilute the mean") {
  gm::Rng rng(22);
  const Eigen::MatrixXd za = random_matrix(rng, 3, 4);
  const Eigen::MatrixXd zb = random_matrix(rng, 2, 4);
  const std::vector<std::pair<int, int>> corr = {{0, 0}, {2, 1}};
  const double loss = contrastive_value(za, zb, corr, 0.5);

  // Manual reference: anchor 1 of A contributes nothing; denominator is
  // N_A + N_B = 5 regardless.
  auto ell = [&](const Eigen::MatrixXd& z_self, const Eigen::MatrixXd& z_other, int i, int pos) {
    const double numer =
        std::exp(gm::cosine_similarity(z_self.row(i), z_other.row(pos)) / 0.5);
    return -std::log(numer / (gm::intra_term(z_self, i, 0.5) +
                              gm::inter_term(z_self, z_other, i, 0.5)));
  };
  const double expect =
      (ell(za, zb, 0, 0) + ell(za, zb, 2, 1) + ell(zb, za, 0, 0) + ell(zb, za, 1, 2)) / 5.0;
  CHECK(loss == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("contrastive loss input validation") {
  gm::ad::Tape tape;
  const auto za = tape.leaf(Eigen::MatrixXd::Identity(3, 3));
  const auto zb = tape.leaf(Eigen::MatrixXd::Identity(2, 3));
  CHECK_THROWS_AS(gm::node_contrastive_loss(tape, za, zb, {}, 0.5), gm::NoPositivesError);
  CHECK_THROWS_AS(gm::node_contrastive_loss(tape, za, zb, {{0, 5}}, 0.5), gm::DataError);
  CHECK_THROWS_AS(gm::node_contrastive_loss(tape, za, zb, {{-1, 0}}, 0.5), gm::DataError);
  CHECK_THROWS_AS(gm::node_contrastive_loss(tape, za, zb, {{0, 0}, {0, 1}}, 0.5), gm::DataError);
  CHECK_THROWS_AS(gm::node_contrastive_loss(tape, za, zb, {{0, 0}, {1, 0}}, 0.5), gm::DataError);
  CHECK_THROWS_AS(gm::node_contrastive_loss(tape, za, zb, {{0, 0}}, 0.0), gm::ConfigError);
}

TEST_CASE("hamming loss worked examples") {
  gm::LossConfig cfg;
  cfg.matching_loss_kind = gm::MatchingLossKind::Hamming;

  // Uniform doubly stochastic prediction vs identity at N = 2: every entry is
  // off by 0.5, so the mean absolute difference is 0.5.
  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK(matching_value(uniform, Eigen::MatrixXd::Identity(2, 2), cfg) ==
        doctest::Approx(0.5).epsilon(1e-12));

  // Perfect prediction scores zero.
  CHECK(matching_value(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2), cfg) ==
        0.0);

  // Rectangular case, manual mean.
  Eigen::MatrixXd pred(2, 3), gt(2, 3);
  pred << 0.7, 0.2, 0.1, 0.1, 0.8, 0.1;
  gt << 1, 0, 0, 0, 1, 0;
  const double expect = ((pred - gt).array().abs().sum()) / 6.0;
  CHECK(matching_value(pred, gt, cfg) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("permutation loss worked examples") {
  Eigen::MatrixXd pred(2, 2);
  pred << 0.9, 0.1, 0.2, 0.8;
  const Eigen::MatrixXd gt = Eigen::MatrixXd::Identity(2, 2);

  gm::LossConfig cfg;
  cfg.matching_loss_kind = gm::MatchingLossKind::Permutation;

  // Balanced: -(log .9 + log .8)/2 - (log .9 + log .8)/(2 * 1).
  cfg.permutation_balanced = true;
  const double pos_sum = std::log(0.9) + std::log(0.8);
  const double neg_sum = std::log(1 - 0.1) + std::log(1 - 0.2);
  CHECK(matching_value(pred, gt, cfg) ==
        doctest::Approx(-pos_sum / 2.0 - neg_sum / 2.0).epsilon(1e-12));

  // Unbalanced: -(pos + neg) / (rows-with-positive * N_B).
  cfg.permutation_balanced = false;
  CHECK(matching_value(pred, gt, cfg) ==
        doctest::Approx(-(pos_sum + neg_sum) / 4.0).epsilon(1e-12));

  // Rows without a positive are ignored entirely: appending an unmatched row
  // leaves the balanced loss unchanged.
  cfg.permutation_balanced = true;
  Eigen::MatrixXd pred3(3, 2), gt3(3, 2);
  pred3 << 0.9, 0.1, 0.2, 0.8, 0.6, 0.6;
  gt3 << 1, 0, 0, 1, 0, 0;
  CHECK(matching_value(pred3, gt3, cfg) ==
        doctest::Approx(-pos_sum / 2.0 - neg_sum / 2.0).epsilon(1e-12));

  // Perfect binary prediction scores zero in both variants.
  CHECK(matching_value(gt, gt, cfg) == doctest::Approx(0.0));
  cfg.permutation_balanced = false;
  CHECK(matching_value(gt, gt, cfg) == doctest::Approx(0.0));
}

TEST_CASE("single-column ground truth avoids a zero negative normalizer") {
  // N_B = 1: every entry of a matched row is the positive; the negative term
  // is empty and the max(N_B - 1, 1) guard keeps the loss finite.
  gm::LossConfig cfg;
  cfg.matching_loss_kind = gm::MatchingLossKind::Permutation;
  Eigen::MatrixXd pred(2, 1), gt(2, 1);
  pred << 0.9, 0.4;
  gt << 1, 1;
  const double expect = -(std::log(0.9) + std::log(0.4)) / 2.0;
  CHECK(matching_value(pred, gt, cfg) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("empty ground truth gives a constant zero, not an error") {
  gm::LossConfig cfg;
  for (gm::MatchingLossKind kind :
       {gm::MatchingLossKind::Permutation, gm::MatchingLossKind::Hamming}) {
    cfg.matching_loss_kind = kind;
    gm::ad::Tape tape;
    Eigen::MatrixXd pred = Eigen::MatrixXd::Constant(2, 3, 0.3);
    const auto v = tape.leaf(pred);
    gm::ad::Var loss;
    if (kind == gm::MatchingLossKind::Permutation) {
      // Permutation loss with no positive rows is the degenerate case.
      loss = gm::matching_loss(tape, v, Eigen::MatrixXd::Zero(2, 3), cfg);
      CHECK(tape.value(loss)(0, 0) == 0.0);
      tape.backward(loss);
      CHECK(tape.grad(v).isZero(0.0));
    } else {
      // Hamming against an all-zero matrix is still a plain mean |pred|.
      loss = gm::matching_loss(tape, v, Eigen::MatrixXd::Zero(2, 3), cfg);
      CHECK(tape.value(loss)(0, 0) == doctest::Approx(0.3));
    }
  }
}

TEST_CASE("total loss is the plain sum of its parts") {
  gm::ad::Tape tape;
  const auto a = tape.leaf(Eigen::MatrixXd::Constant(1, 1, 1.25));
  const auto b = tape.leaf(Eigen::MatrixXd::Constant(1, 1, 0.5));
  const auto t = gm::total_loss(tape, a, b);
  CHECK(tape.value(t)(0, 0) == 1.75);
  tape.backward(t);
  CHECK(tape.grad(a)(0, 0) == 1.0);
  CHECK(tape.grad(b)(0, 0) == 1.0);
}

TEST_CASE("loss gradients match finite differences") {
  gm::Rng rng(31);

  SUBCASE("contrastive") {
    const std::vector<std::pair<int, int>> corr = {{0, 2}, {1, 0}, {3, 1}};
    const gmtest::LossBuilder build = [&corr](gm::ad::Tape& tape,
                                              const std::vector<gm::ad::Var>& v) {
      return gm::node_contrastive_loss(tape, v[0], v[1], corr, 0.5);
    };
    const double err =
        gmtest::max_rel_grad_err(build, {random_matrix(rng, 4, 3), random_matrix(rng, 3, 3)});
    CHECK(err < 1e-5);
  }
  SUBCASE("hamming through a soft prediction") {
    Eigen::MatrixXd gt = Eigen::MatrixXd::Zero(3, 3);
    gt(0, 1) = gt(1, 0) = gt(2, 2) = 1.0;
    gm::LossConfig cfg;
    cfg.matching_loss_kind = gm::MatchingLossKind::Hamming;
    const gmtest::LossBuilder build = [&gt, &cfg](gm::ad::Tape& tape,
                                                  const std::vector<gm::ad::Var>& v) {
      // abs has a kink at 0; inputs sit in (0.05, 0.95) so pred != gt
      // everywhere and central differences are clean.
      return gm::matching_loss(tape, v[0], gt, cfg);
    };
    const double err = gmtest::max_rel_grad_err(build, {random_matrix(rng, 3, 3, 0.05, 0.95)});
    CHECK(err < 1e-5);
  }
  SUBCASE("permutation, balanced and unbalanced") {
    Eigen::MatrixXd gt = Eigen::MatrixXd::Zero(3, 4);
    gt(0, 0) = gt(2, 3) = 1.0;
    for (bool balanced : {true, false}) {
      gm::LossConfig cfg;
      cfg.permutation_balanced = balanced;
      const gmtest::LossBuilder build = [&gt, &cfg](gm::ad::Tape& tape,
                                                    const std::vector<gm::ad::Var>& v) {
        return gm::matching_loss(tape, v[0], gt, cfg);
      };
      const double err = gmtest::max_rel_grad_err(build, {random_matrix(rng, 3, 4, 0.05, 0.95)});
      CHECK(err < 1e-5);
    }
  }
}
