#include "gm/losses.hpp"

#include <cmath>
#include <iostream>
#include <vector>

#include "gm/errors.hpp"

namespace gm {

namespace {

constexpr double kNormGuard = 1e-12;

}  // namespace

const char* matching_loss_kind_name(MatchingLossKind kind) {
  switch (kind) {
    case MatchingLossKind::Permutation:
      return "permutation";
    case MatchingLossKind::Hamming:
      return "hamming";
  }
  throw ConfigError("unknown matching loss kind");
}

MatchingLossKind matching_loss_kind_from_name(const std::string& name) {
  if (name == "permutation") return MatchingLossKind::Permutation;
  if (name == "hamming") return MatchingLossKind::Hamming;
  throw ConfigError("unknown matching loss kind: '" + name + "'");
}

void LossConfig::validate() const {
  if (!(temperature > 0.0)) {
    throw ConfigError("loss temperature must be positive, got " +
                      std::to_string(temperature));
  }
}

Json loss_config_to_json(const LossConfig& cfg) {
  Json j;
  j["temperature"] = cfg.temperature;
  j["matching_loss_kind"] = matching_loss_kind_name(cfg.matching_loss_kind);
  j["permutation_balanced"] = cfg.permutation_balanced;
  return j;
}

LossConfig loss_config_from_json(const Json& j) {
  LossConfig cfg;
  cfg.temperature = require_key(j, "temperature", "loss config").get<double>();
  cfg.matching_loss_kind = matching_loss_kind_from_name(
      require_key(j, "matching_loss_kind", "loss config").get<std::string>());
  cfg.permutation_balanced =
      require_key(j, "permutation_balanced", "loss config").get<bool>();
  cfg.validate();
  return cfg;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine_similarity: vector lengths differ");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kNormGuard || nb < kNormGuard) {
    return 0.0;
  }
  return a.dot(b) / (na * nb);
}

double intra_term(const Eigen::MatrixXd& z, int i, double temperature) {
  if (i < 0 || i >= z.rows()) {
    throw ShapeError("intra_term: anchor index out of range");
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < z.rows(); ++j) {
    if (j == i) continue;
    sum += std::exp(cosine_similarity(z.row(i), z.row(j)) / temperature);
  }
  return sum;
}

double inter_term(const Eigen::MatrixXd& z_a, const Eigen::MatrixXd& z_b,
                  int i, double temperature) {
  if (i < 0 || i >= z_a.rows()) {
    throw ShapeError("inter_term: anchor index out of range");
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < z_b.rows(); ++j) {
    sum += std::exp(cosine_similarity(z_a.row(i), z_b.row(j)) / temperature);
  }
  return sum;
}

namespace {

// Sum over the matched anchors of `z_one_n` of -log(positive / (intra +
// inter)) against the other view. `pos_mask` is N_one x N_other with one 1
// in each matched anchor's row.
ad::Var one_side_sum(ad::Tape& tape, ad::Var z_one_n, ad::Var z_other_n,
                     const Eigen::MatrixXd& pos_mask, double temperature) {
  const double inv_t = 1.0 / temperature;
  const Eigen::Index n_one = pos_mask.rows();

  ad::Var e_cross =
      ad::exp(ad::scalar_mul(ad::matmul(z_one_n, ad::transpose(z_other_n)), inv_t));
  ad::Var e_within =
      ad::exp(ad::scalar_mul(ad::matmul(z_one_n, ad::transpose(z_one_n)), inv_t));

  // intra_i removes the anchor's own similarity from the within-view sum.
  ad::Var diag = ad::row_sum(
      ad::cmul(e_within, tape.constant(Eigen::MatrixXd::Identity(n_one, n_one))));
  ad::Var intra = ad::subtract(ad::row_sum(e_within), diag);
  ad::Var inter = ad::row_sum(e_cross);
  ad::Var denom = ad::add(intra, inter);

  // The positive similarity for each matched anchor; zero rows elsewhere.
  ad::Var positive = ad::row_sum(ad::cmul(e_cross, tape.constant(pos_mask)));

  // -log(pos / denom), masked to matched anchors. An unmatched row passes
  // through the log guard and is then zeroed by the mask, so neither its
  // value nor its gradient reaches the result.
  const Eigen::MatrixXd anchor_mask = pos_mask.rowwise().sum();
  ad::Var per_anchor = ad::subtract(ad::log(denom), ad::log(positive));
  return ad::sum(ad::cmul(per_anchor, tape.constant(anchor_mask)));
}

}  // namespace

ad::Var node_contrastive_loss(ad::Tape& tape, ad::Var z_a, ad::Var z_b,
                              const std::vector<std::pair<int, int>>& correspondence,
                              double temperature) {
  if (!(temperature > 0.0)) {
    throw ConfigError("node_contrastive_loss: temperature must be positive");
  }
  if (correspondence.empty()) {
    throw NoPositivesError("node_contrastive_loss: no anchor has a positive");
  }
  const Eigen::Index n_a = tape.value(z_a).rows();
  const Eigen::Index n_b = tape.value(z_b).rows();
  if (tape.value(z_a).cols() != tape.value(z_b).cols()) {
    throw ShapeError("node_contrastive_loss: embedding widths differ");
  }

  Eigen::MatrixXd pos_ab = Eigen::MatrixXd::Zero(n_a, n_b);
  for (const auto& [i, j] : correspondence) {
    if (i < 0 || i >= n_a || j < 0 || j >= n_b) {
      throw DataError("node_contrastive_loss: correspondence index out of range");
    }
    if (pos_ab.row(i).sum() > 0.0 || pos_ab.col(j).sum() > 0.0) {
      throw DataError("node_contrastive_loss: correspondence is not one-to-one");
    }
    pos_ab(i, j) = 1.0;
  }

  ad::Var z_a_n = ad::row_l2_normalize(z_a);
  ad::Var z_b_n = ad::row_l2_normalize(z_b);

  ad::Var sum_a = one_side_sum(tape, z_a_n, z_b_n, pos_ab, temperature);
  ad::Var sum_b = one_side_sum(tape, z_b_n, z_a_n, pos_ab.transpose(), temperature);

  return ad::scalar_mul(ad::add(sum_a, sum_b),
                        1.0 / static_cast<double>(n_a + n_b));
}

ad::Var matching_loss(ad::Tape& tape, ad::Var g_hat,
                      const Eigen::MatrixXd& g_self, const LossConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd& pred = tape.value(g_hat);
  if (pred.rows() != g_self.rows() || pred.cols() != g_self.cols()) {
    throw ShapeError("matching_loss: prediction and ground truth shapes differ");
  }
  const Eigen::Index n_a = g_self.rows();
  const Eigen::Index n_b = g_self.cols();

  if (cfg.matching_loss_kind == MatchingLossKind::Hamming) {
    ad::Var diff = ad::subtract(g_hat, tape.constant(g_self));
    return ad::scalar_mul(ad::sum(ad::abs(diff)),
                          1.0 / static_cast<double>(n_a * n_b));
  }

  // Permutation loss: binary cross entropy over the rows that have a
  // ground-truth positive.
  const Eigen::VectorXd row_has_pos =
      (g_self.rowwise().sum().array() > 0.0).cast<double>();
  const double n_pos_rows = row_has_pos.sum();
  if (n_pos_rows == 0.0) {
    std::cerr << "warning: matching loss got an empty ground truth; "
                 "contributing zero\n";
    return tape.constant_scalar(0.0);
  }

  const Eigen::MatrixXd pos_mask = g_self;
  const Eigen::MatrixXd neg_mask =
      row_has_pos * Eigen::RowVectorXd::Ones(n_b) - g_self;

  ad::Var log_pred = ad::log(g_hat);
  ad::Var log_one_minus = ad::log(
      ad::subtract(tape.constant(Eigen::MatrixXd::Ones(n_a, n_b)), g_hat));
  ad::Var pos_sum = ad::sum(ad::cmul(log_pred, tape.constant(pos_mask)));
  ad::Var neg_sum = ad::sum(ad::cmul(log_one_minus, tape.constant(neg_mask)));

  if (cfg.permutation_balanced) {
    // Each matched row contributes unit weight on each side; its negatives
    // share the unit across the n_b - 1 non-positive columns.
    const double neg_norm =
        n_pos_rows * std::max<double>(static_cast<double>(n_b) - 1.0, 1.0);
    ad::Var pos_term = ad::scalar_mul(pos_sum, -1.0 / n_pos_rows);
    ad::Var neg_term = ad::scalar_mul(neg_sum, -1.0 / neg_norm);
    return ad::add(pos_term, neg_term);
  }
  const double denom = n_pos_rows * static_cast<double>(n_b);
  return ad::scalar_mul(ad::add(pos_sum, neg_sum), -1.0 / denom);
}

ad::Var total_loss(ad::Tape& tape, ad::Var l_node, ad::Var l_match) {
  (void)tape;
  return ad::add(l_node, l_match);
}

}  // namespace gm
