#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gm/autodiff.hpp"
#include "gm/json_util.hpp"

namespace gm {

// Which discrete-matching loss is applied to the soft assignment matrix.
enum class MatchingLossKind {
  Permutation,  // row-wise binary cross-entropy against the self ground truth
  Hamming,      // mean absolute difference against the self ground truth
};

const char* matching_loss_kind_name(MatchingLossKind kind);
MatchingLossKind matching_loss_kind_from_name(const std::string& name);

struct LossConfig {
  // Temperature for the cosine-similarity logits of the contrastive loss.
  double temperature = 0.5;
  MatchingLossKind matching_loss_kind = MatchingLossKind::Permutation;
  // Balanced BCE normalizes positives and negatives separately; the
  // unbalanced variant averages over all entries of rows with a positive.
  bool permutation_balanced = true;

  void validate() const;
};

Json loss_config_to_json(const LossConfig& cfg);
LossConfig loss_config_from_json(const Json& j);

// Cosine similarity with the same zero-vector guard as row_l2_normalize:
// vectors with norm below the guard are treated as zero.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Sum over j != i of exp(cos(z_i, z_j) / temperature) within one view.
double intra_term(const Eigen::MatrixXd& z, int i, double temperature);

// Sum over all j of exp(cos(z_a_i, z_b_j) / temperature) across views.
// The positive pair's own term is part of this sum.
double inter_term(const Eigen::MatrixXd& z_a, const Eigen::MatrixXd& z_b,
                  int i, double temperature);

// Symmetric normalized-temperature cross entropy over node embeddings.
// `correspondence` pairs an anchor row of z_a with its positive row of z_b;
// anchors that appear in no pair are excluded from the numerator sums, but
// the average keeps the full N_A + N_B denominator.
// Throws NoPositivesError when `correspondence` is empty.
ad::Var node_contrastive_loss(ad::Tape& tape, ad::Var z_a, ad::Var z_b,
                              const std::vector<std::pair<int, int>>& correspondence,
                              double temperature);

// Loss between the soft assignment `g_hat` (entries in [0, 1]) and the
// binary self ground truth. An all-zero ground truth yields a constant zero
// contribution and a warning on stderr rather than an error.
ad::Var matching_loss(ad::Tape& tape, ad::Var g_hat,
                      const Eigen::MatrixXd& g_self, const LossConfig& cfg);

// Training objective: plain unweighted sum of the two parts.
ad::Var total_loss(ad::Tape& tape, ad::Var l_node, ad::Var l_match);

}  // namespace gm
