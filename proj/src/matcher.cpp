#include "gm/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "gm/delaunay.hpp"
#include "gm/errors.hpp"

namespace gm {

void SinkhornConfig::validate() const {
  if (!(tau > 0.0)) {
    throw ConfigError("sinkhorn tau must be positive, got " + std::to_string(tau));
  }
  if (iterations < 1) {
    throw ConfigError("sinkhorn iterations must be >= 1, got " +
                      std::to_string(iterations));
  }
  if (!std::isfinite(epsilon)) {
    throw ConfigError("sinkhorn epsilon must be finite");
  }
}

Json sinkhorn_config_to_json(const SinkhornConfig& cfg) {
  Json j;
  j["tau"] = cfg.tau;
  j["iterations"] = cfg.iterations;
  j["epsilon"] = cfg.epsilon;
  return j;
}

SinkhornConfig sinkhorn_config_from_json(const Json& j) {
  SinkhornConfig cfg;
  cfg.tau = require_key(j, "tau", "sinkhorn config").get<double>();
  cfg.iterations = require_key(j, "iterations", "sinkhorn config").get<int>();
  cfg.epsilon = require_key(j, "epsilon", "sinkhorn config").get<double>();
  cfg.validate();
  return cfg;
}

const char* eval_setting_name(EvalSetting setting) {
  switch (setting) {
    case EvalSetting::Intersection:
      return "intsec";
    case EvalSetting::Unfiltered:
      return "unfilt";
  }
  throw ConfigError("unknown eval setting");
}

EvalSetting eval_setting_from_name(const std::string& name) {
  if (name == "intsec" || name == "intersection") return EvalSetting::Intersection;
  if (name == "unfilt" || name == "unfiltered") return EvalSetting::Unfiltered;
  throw ConfigError("unknown eval setting: '" + name + "'");
}

ad::Var affinity(ad::Tape& tape, ad::Var h_a, ad::Var w_aff, ad::Var h_b) {
  (void)tape;
  return ad::matmul(ad::matmul(h_a, w_aff), ad::transpose(h_b));
}

double sinkhorn_deviation(const Eigen::MatrixXd& padded) {
  const double row_dev = (padded.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col_dev = (padded.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(row_dev, col_dev);
}

ad::Var sinkhorn_padded(ad::Tape& tape, ad::Var logits, const SinkhornConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd& m = tape.value(logits);
  if (!m.allFinite()) {
    throw NonFiniteError("sinkhorn: non-finite affinity input");
  }
  const Eigen::Index n_a = m.rows();
  const Eigen::Index n_b = m.cols();

  ad::Var padded = logits;
  if (n_a < n_b) {
    padded = ad::concat_rows(logits,
                             tape.constant(Eigen::MatrixXd::Zero(n_b - n_a, n_b)));
  } else if (n_a > n_b) {
    padded = ad::concat_cols(logits,
                             tape.constant(Eigen::MatrixXd::Zero(n_a, n_a - n_b)));
  }

  // Uniform shift by the global max keeps exp() in range; being uniform over
  // the whole padded matrix, it cancels in the first normalization pass.
  const double shift = tape.value(padded).maxCoeff();
  ad::Var scores =
      ad::exp(ad::scalar_mul(ad::scalar_add(padded, -shift), 1.0 / cfg.tau));

  // Normalize the padded axis first so that a constant added to the real
  // logits scales complete lines uniformly and cancels exactly.
  const bool rows_first = n_a <= n_b;
  for (int round = 0; round < cfg.iterations; ++round) {
    if (rows_first) {
      scores = ad::row_sum_normalize(scores);
      scores = ad::col_sum_normalize(scores);
    } else {
      scores = ad::col_sum_normalize(scores);
      scores = ad::row_sum_normalize(scores);
    }
    if (cfg.epsilon > 0.0 && sinkhorn_deviation(tape.value(scores)) < cfg.epsilon) {
      break;
    }
  }
  return scores;
}

ad::Var sinkhorn(ad::Tape& tape, ad::Var logits, const SinkhornConfig& cfg) {
  const Eigen::Index n_a = tape.value(logits).rows();
  const Eigen::Index n_b = tape.value(logits).cols();
  ad::Var padded = sinkhorn_padded(tape, logits, cfg);
  ad::Var block = padded;
  if (tape.value(padded).rows() > n_a) {
    block = ad::slice_rows(block, 0, static_cast<int>(n_a));
  }
  if (tape.value(padded).cols() > n_b) {
    block = ad::slice_cols(block, 0, static_cast<int>(n_b));
  }
  return block;
}

Eigen::MatrixXd sinkhorn_matrix(const Eigen::MatrixXd& logits,
                                const SinkhornConfig& cfg) {
  ad::Tape tape;
  ad::Var in = tape.constant(logits);
  return tape.value(sinkhorn(tape, in, cfg));
}

std::vector<std::pair<int, int>> hungarian(const Eigen::MatrixXd& scores) {
  if (scores.size() == 0) {
    return {};
  }
  if (!scores.allFinite()) {
    throw NonFiniteError("hungarian: non-finite score matrix");
  }

  // Work on a rows <= cols minimization problem.
  const bool transposed = scores.rows() > scores.cols();
  const Eigen::MatrixXd s =
      transposed ? Eigen::MatrixXd(scores.transpose()) : scores;
  const int n = static_cast<int>(s.rows());
  const int m = static_cast<int>(s.cols());
  const Eigen::MatrixXd cost = (s.array() * -1.0 + s.maxCoeff()).matrix();

  // Jonker-Volgenant shortest augmenting paths with dual potentials,
  // 1-based with column 0 as the working slot.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(m + 1, 0.0);
  std::vector<int> matched_row(m + 1, 0);  // matched_row[j]: row on column j
  std::vector<int> way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    matched_row[0] = i;
    int j0 = 0;
    std::vector<double> min_reduced(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = matched_row[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_reduced[j]) {
          min_reduced[j] = reduced;
          way[j] = j0;
        }
        if (min_reduced[j] < delta) {
          delta = min_reduced[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[matched_row[j]] += delta;
          v[j] -= delta;
        } else {
          min_reduced[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched_row[j0] != 0);
    do {
      const int j1 = way[j0];
      matched_row[j0] = matched_row[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::pair<int, int>> assignment;
  assignment.reserve(n);
  for (int j = 1; j <= m; ++j) {
    if (matched_row[j] == 0) continue;
    const int r = matched_row[j] - 1;
    const int c = j - 1;
    if (transposed) {
      assignment.emplace_back(c, r);
    } else {
      assignment.emplace_back(r, c);
    }
  }
  std::sort(assignment.begin(), assignment.end());
  return assignment;
}

double assignment_score(const Eigen::MatrixXd& scores,
                        const std::vector<std::pair<int, int>>& assignment) {
  double total = 0.0;
  for (const auto& [i, j] : assignment) {
    total += scores(i, j);
  }
  return total;
}

namespace {

Graph restricted_graph(const Graph& g, const std::vector<int>& keep) {
  Graph out = induced_subgraph(g, keep);
  if (out.coords.has_value() && out.num_nodes() >= 3) {
    try {
      out.adjacency = delaunay_triangulate(*out.coords);
    } catch (const DataError&) {
      // Degenerate restricted coordinates: keep the induced edges.
    }
  }
  return out;
}

}  // namespace

GraphPair restrict_to_intersection(const GraphPair& pair) {
  if (pair.gt_matching.empty()) {
    throw EmptyIntersectionError(
        "intersection setting: the pair shares no ground-truth nodes");
  }
  std::vector<int> src_keep;
  std::vector<int> tgt_keep;
  src_keep.reserve(pair.gt_matching.size());
  tgt_keep.reserve(pair.gt_matching.size());
  for (const auto& [i, j] : pair.gt_matching) {
    src_keep.push_back(i);
    tgt_keep.push_back(j);
  }
  std::sort(src_keep.begin(), src_keep.end());
  std::sort(tgt_keep.begin(), tgt_keep.end());

  std::unordered_map<int, int> src_new;
  std::unordered_map<int, int> tgt_new;
  for (size_t k = 0; k < src_keep.size(); ++k) src_new[src_keep[k]] = static_cast<int>(k);
  for (size_t k = 0; k < tgt_keep.size(); ++k) tgt_new[tgt_keep[k]] = static_cast<int>(k);

  GraphPair out;
  out.source = restricted_graph(pair.source, src_keep);
  out.target = restricted_graph(pair.target, tgt_keep);
  out.gt_matching.reserve(pair.gt_matching.size());
  for (const auto& [i, j] : pair.gt_matching) {
    out.gt_matching.emplace_back(src_new.at(i), tgt_new.at(j));
  }
  std::sort(out.gt_matching.begin(), out.gt_matching.end());
  out.validate();
  return out;
}

}  // namespace gm
