#include "gm/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "gm/errors.hpp"
#include "gm/evaluation.hpp"
#include "gm/losses.hpp"

namespace gm {

namespace {

constexpr int kIterations = 200;
constexpr double kTol = 1e-9;
constexpr double kNormFloor = 1e-300;

}  // namespace

Eigen::VectorXd power_iteration(const Eigen::MatrixXd& m, int iterations,
                                double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ShapeError("power_iteration: matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw NonFiniteError("power_iteration: non-finite matrix");
  }
  const Eigen::Index n = m.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd next = m * x;
    const double norm = next.norm();
    if (norm < kNormFloor) {
      break;  // x is (numerically) in the null space; keep the last iterate
    }
    next /= norm;
    const double diff = std::min((next - x).norm(), (next + x).norm());
    x = next;
    if (diff < tol) {
      break;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x[i] != 0.0) {
      if (x[i] < 0.0) x = -x;
      break;
    }
  }
  return x;
}

Eigen::MatrixXd spectral_soft(const Graph& source, const Graph& target) {
  source.validate();
  target.validate();
  if (source.feature_dim() != target.feature_dim()) {
    throw DataError("spectral_soft: feature dimensions differ");
  }
  const int n_a = source.num_nodes();
  const int n_b = target.num_nodes();

  // Node-to-node scores: cosine similarity clamped at zero so the iteration
  // matrix stays nonnegative (Perron-Frobenius regime).
  Eigen::MatrixXd c(n_a, n_b);
  for (int i = 0; i < n_a; ++i) {
    for (int j = 0; j < n_b; ++j) {
      c(i, j) = std::max(
          0.0, cosine_similarity(source.features.row(i), target.features.row(j)));
    }
  }

  const double avg_deg_a = source.adjacency.sum() / static_cast<double>(n_a);
  const double avg_deg_b = target.adjacency.sum() / static_cast<double>(n_b);
  const double w_unary = std::max(1.0, 0.5 * (avg_deg_a + avg_deg_b));

  const double init = 1.0 / std::sqrt(static_cast<double>(n_a) * n_b);
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(n_a, n_b, init);
  for (int it = 0; it < kIterations; ++it) {
    Eigen::MatrixXd next =
        w_unary * c.cwiseProduct(x) + source.adjacency * x * target.adjacency;
    const double norm = next.norm();
    if (norm < kNormFloor) {
      break;  // no affinity signal at all; keep the uniform iterate
    }
    next /= norm;
    const double diff = (next - x).norm();
    x = next;
    if (diff < kTol) {
      break;
    }
  }
  return x;
}

std::vector<std::pair<int, int>> greedy_discretize(const Eigen::MatrixXd& scores) {
  if (!scores.allFinite()) {
    throw NonFiniteError("greedy_discretize: non-finite scores");
  }
  Eigen::MatrixXd s = scores;
  const int picks = static_cast<int>(std::min(s.rows(), s.cols()));
  std::vector<std::pair<int, int>> assignment;
  assignment.reserve(picks);
  for (int k = 0; k < picks; ++k) {
    int best_i = -1;
    int best_j = -1;
    double best = 0.0;
    for (int i = 0; i < s.rows(); ++i) {
      for (int j = 0; j < s.cols(); ++j) {
        if (s(i, j) > best) {
          best = s(i, j);
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i < 0) {
      break;  // nothing strictly positive is left
    }
    assignment.emplace_back(best_i, best_j);
    s.row(best_i).setConstant(-1.0);
    s.col(best_j).setConstant(-1.0);
  }
  std::sort(assignment.begin(), assignment.end());
  return assignment;
}

MatchResult spectral_match(const GraphPair& pair) {
  MatchResult result;
  result.soft = spectral_soft(pair.source, pair.target);
  result.assignment = greedy_discretize(result.soft);
  result.score = assignment_score(result.soft, result.assignment);
  result.f1 = f1_score(result.assignment, pair.gt_matching);
  return result;
}

}  // namespace gm
