#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gm/autodiff.hpp"
#include "gm/graph.hpp"
#include "gm/json_util.hpp"

namespace gm {

struct SinkhornConfig {
  // Softmax sharpness: logits are divided by tau before exponentiation.
  double tau = 0.05;
  // Maximum normalization rounds (one round = one row pass + one column pass).
  int iterations = 100;
  // Early-stop tolerance on the max row/column-sum deviation of the padded
  // matrix; a non-positive value disables early stopping.
  double epsilon = 1e-6;

  void validate() const;
};

Json sinkhorn_config_to_json(const SinkhornConfig& cfg);
SinkhornConfig sinkhorn_config_from_json(const Json& j);

// Evaluation settings: restrict both graphs to the ground-truth-shared
// nodes, or keep every node including outliers.
enum class EvalSetting { Intersection, Unfiltered };

const char* eval_setting_name(EvalSetting setting);
EvalSetting eval_setting_from_name(const std::string& name);

struct MatchResult {
  Eigen::MatrixXd soft;                          // N_A x N_B soft assignment
  std::vector<std::pair<int, int>> assignment;   // discrete partial injection
  double score = 0.0;                            // total soft score of the assignment
  double f1 = 0.0;                               // vs the pair's ground truth
};

// Bilinear affinity M_ij = h_i_a . W . h_j_b, differentiable in all inputs.
ad::Var affinity(ad::Tape& tape, ad::Var h_a, ad::Var w_aff, ad::Var h_b);

// Differentiable Sinkhorn normalization. The logit matrix is padded to
// square with zero-logit dummy rows or columns when rectangular, shifted by
// its global max for stability, exponentiated at temperature tau, then
// alternately normalized. The first normalized axis is the padded one (rows
// when dummy rows were added, columns when dummy columns were added, rows
// for square input); that makes the result exactly invariant to adding a
// constant to every input logit, because the uniform scale factor cancels
// in the first pass. `sinkhorn_padded` returns the full square matrix;
// `sinkhorn` returns its N_A x N_B top-left block.
ad::Var sinkhorn_padded(ad::Tape& tape, ad::Var logits, const SinkhornConfig& cfg);
ad::Var sinkhorn(ad::Tape& tape, ad::Var logits, const SinkhornConfig& cfg);

// Convenience non-differentiable form for inference.
Eigen::MatrixXd sinkhorn_matrix(const Eigen::MatrixXd& logits,
                                const SinkhornConfig& cfg);

// Max over all rows and columns of |sum - 1| for a square matrix.
double sinkhorn_deviation(const Eigen::MatrixXd& padded);

// Maximum-total-score assignment of size min(N_A, N_B), as (row, col) pairs
// sorted by row. Deterministic: among equal-cost options the lowest column
// index wins during each scan.
std::vector<std::pair<int, int>> hungarian(const Eigen::MatrixXd& scores);

// Total soft score collected by an assignment.
double assignment_score(const Eigen::MatrixXd& scores,
                        const std::vector<std::pair<int, int>>& assignment);

// Restrict both graphs of a pair to the nodes that appear in gt_matching,
// re-indexing nodes in ascending original order and re-triangulating each
// restricted graph from its coordinates when they are present (falling back
// to the induced edges when triangulation is impossible). The ground truth
// is re-indexed accordingly. Throws EmptyIntersectionError when gt_matching
// is empty.
GraphPair restrict_to_intersection(const GraphPair& pair);

}  // namespace gm
