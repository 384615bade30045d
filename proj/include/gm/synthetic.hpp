#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gm/graph.hpp"

namespace gm {

// Configuration for the synthetic matching-pair generator. A class is a
// template of inlier points (unit-square coordinates plus standard-normal
// features); each pair of the class re-triangulates the source (template plus
// fresh source outliers) and a perturbed target (coordinate noise, feature
// noise, fresh target outliers). Inliers occupy indices 0..n_inliers-1 in
// both graphs and the ground truth is the identity on them.
struct SyntheticConfig {
  int n_inliers = 10;
  int n_outliers_source = 2;
  int n_outliers_target = 4;
  int feature_dim = 16;
  double coord_noise_sigma = 0.05;
  double feature_noise_sigma = 0.2;
  int n_classes = 20;
  int pairs_per_class = 20;
  std::uint64_t seed = 7;
  bool include_coords_in_features = false;

  void validate() const;  // throws ConfigError
};

struct ClassTemplate {
  Eigen::MatrixXd coords;    // n_inliers x 2
  Eigen::MatrixXd features;  // n_inliers x feature_dim
};

struct Dataset {
  struct ClassEntry {
    int class_id = 0;
    ClassTemplate tmpl;
    std::vector<GraphPair> pairs;
  };
  SyntheticConfig config;
  std::vector<ClassEntry> classes;

  std::vector<GraphPair> all_pairs() const;
  std::vector<Graph> all_graphs() const;  // source + target of every pair
  int num_pairs() const;
};

// Deterministic template for one class (stream derived from config.seed and
// class_idx).
ClassTemplate make_class_template(const SyntheticConfig& cfg, int class_idx);

// Deterministic pair (stream derived from config.seed, class_idx, pair_idx).
// Degenerate coordinate draws (collinear/duplicate) are redrawn up to a
// bounded number of attempts.
GraphPair gen_synthetic_pair(const SyntheticConfig& cfg, const ClassTemplate& tmpl,
                             int class_idx, int pair_idx);

Dataset gen_dataset(const SyntheticConfig& cfg);

}  // namespace gm
