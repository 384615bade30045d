#pragma once

#include <Eigen/Dense>

#include "gm/graph.hpp"
#include "gm/matcher.hpp"

namespace gm {

// Leading eigenvector of a square matrix by power iteration, normalized to
// unit Euclidean norm with the first nonzero component made positive.
// Stops after `iterations` steps or when consecutive iterates differ by
// less than `tol` in norm.
Eigen::VectorXd power_iteration(const Eigen::MatrixXd& m, int iterations,
                                double tol);

// Learning-free spectral matching scores. The pairwise affinity acts on a
// candidate-match matrix X implicitly as
//   X <- w_unary * (C ∘ X) + A_src * X * A_tgt,
// where C is the clamped-nonnegative feature cosine between nodes (the
// node-to-node part) and the structural term counts supporting neighbor
// matches. w_unary balances the two parts and is the mean of the two
// graphs' average degrees, floored at 1. The returned matrix is the
// Frobenius-normalized leading eigenvector after at most 200 iterations
// (tolerance 1e-9).
Eigen::MatrixXd spectral_soft(const Graph& source, const Graph& target);

// Greedy discretization of a nonnegative score matrix: repeatedly take the
// largest strictly positive entry (ties: lowest row, then lowest column),
// claim its row and column, until min(N_A, N_B) picks or no positive entry
// remains.
std::vector<std::pair<int, int>> greedy_discretize(const Eigen::MatrixXd& scores);

// Full baseline on one pair: spectral scores, greedy assignment, F1 against
// the pair's ground truth.
MatchResult spectral_match(const GraphPair& pair);

}  // namespace gm
