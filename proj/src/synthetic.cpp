#include "gm/synthetic.hpp"

#include <algorithm>
#include <string>

#include "gm/delaunay.hpp"
#include "gm/errors.hpp"
#include "gm/rng.hpp"

namespace gm {

namespace {

constexpr std::uint64_t kTemplateStream = 0x7e3a11;
constexpr std::uint64_t kPairStream = 0x9a12f7;
constexpr int kMaxAttempts = 32;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

Eigen::MatrixXd with_coords(const Eigen::MatrixXd& features, const Eigen::MatrixXd& coords,
                            bool include) {
  if (!include) return features;
  Eigen::MatrixXd out(features.rows(), features.cols() + 2);
  out << features, coords;
  return out;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n_inliers < 3) throw ConfigError("synthetic: n_inliers must be >= 3");
  if (n_outliers_source < 0 || n_outliers_target < 0)
    throw ConfigError("synthetic: outlier counts must be >= 0");
  if (feature_dim < 1) throw ConfigError("synthetic: feature_dim must be >= 1");
  if (coord_noise_sigma < 0.0) throw ConfigError("synthetic: coord_noise_sigma must be >= 0");
  if (feature_noise_sigma < 0.0) throw ConfigError("synthetic: feature_noise_sigma must be >= 0");
  if (n_classes < 0) throw ConfigError("synthetic: n_classes must be >= 0");
  if (pairs_per_class < 0) throw ConfigError("synthetic: pairs_per_class must be >= 0");
}

std::vector<GraphPair> Dataset::all_pairs() const {
  std::vector<GraphPair> out;
  for (const auto& c : classes)
    for (const auto& p : c.pairs) out.push_back(p);
  return out;
}

std::vector<Graph> Dataset::all_graphs() const {
  std::vector<Graph> out;
  for (const auto& c : classes) {
    for (const auto& p : c.pairs) {
      out.push_back(p.source);
      out.push_back(p.target);
    }
  }
  return out;
}

int Dataset::num_pairs() const {
  int n = 0;
  for (const auto& c : classes) n += static_cast<int>(c.pairs.size());
  return n;
}

ClassTemplate make_class_template(const SyntheticConfig& cfg, int class_idx) {
  cfg.validate();
  Rng rng(Rng::derive(cfg.seed, {kTemplateStream, static_cast<std::uint64_t>(class_idx)}));
  ClassTemplate t;
  t.coords.resize(cfg.n_inliers, 2);
  for (int i = 0; i < cfg.n_inliers; ++i) {
    t.coords(i, 0) = rng.uniform01();
    t.coords(i, 1) = rng.uniform01();
  }
  t.features.resize(cfg.n_inliers, cfg.feature_dim);
  for (int i = 0; i < cfg.n_inliers; ++i)
    for (int j = 0; j < cfg.feature_dim; ++j) t.features(i, j) = rng.normal();
  return t;
}

GraphPair gen_synthetic_pair(const SyntheticConfig& cfg, const ClassTemplate& tmpl,
                             int class_idx, int pair_idx) {
  cfg.validate();
  if (tmpl.coords.rows() != cfg.n_inliers || tmpl.features.rows() != cfg.n_inliers ||
      tmpl.features.cols() != cfg.feature_dim)
    throw DataError("gen_synthetic_pair: template does not match config");

  Rng rng(Rng::derive(cfg.seed, {kPairStream, static_cast<std::uint64_t>(class_idx),
                                 static_cast<std::uint64_t>(pair_idx)}));
  const int ni = cfg.n_inliers;
  const int ns = ni + cfg.n_outliers_source;
  const int nt = ni + cfg.n_outliers_target;

  std::string tag = "c" + std::to_string(class_idx) + "_p" + std::to_string(pair_idx);
  DataError last_error("");
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // Source: template inliers plus fresh uniform outliers.
    Eigen::MatrixXd src_coords(ns, 2);
    src_coords.topRows(ni) = tmpl.coords;
    for (int i = ni; i < ns; ++i) {
      src_coords(i, 0) = rng.uniform01();
      src_coords(i, 1) = rng.uniform01();
    }
    // Target: jittered inliers (clamped to the unit square) plus fresh outliers.
    Eigen::MatrixXd tgt_coords(nt, 2);
    for (int i = 0; i < ni; ++i) {
      tgt_coords(i, 0) = clamp01(tmpl.coords(i, 0) + rng.normal(0.0, cfg.coord_noise_sigma));
      tgt_coords(i, 1) = clamp01(tmpl.coords(i, 1) + rng.normal(0.0, cfg.coord_noise_sigma));
    }
    for (int i = ni; i < nt; ++i) {
      tgt_coords(i, 0) = rng.uniform01();
      tgt_coords(i, 1) = rng.uniform01();
    }

    Eigen::MatrixXd src_features(ns, cfg.feature_dim);
    src_features.topRows(ni) = tmpl.features;
    for (int i = ni; i < ns; ++i)
      for (int j = 0; j < cfg.feature_dim; ++j) src_features(i, j) = rng.normal();

    Eigen::MatrixXd tgt_features(nt, cfg.feature_dim);
    for (int i = 0; i < ni; ++i)
      for (int j = 0; j < cfg.feature_dim; ++j)
        tgt_features(i, j) = tmpl.features(i, j) + rng.normal(0.0, cfg.feature_noise_sigma);
    for (int i = ni; i < nt; ++i)
      for (int j = 0; j < cfg.feature_dim; ++j) tgt_features(i, j) = rng.normal();

    try {
      GraphPair pair;
      pair.source.adjacency = delaunay_triangulate(src_coords);
      pair.target.adjacency = delaunay_triangulate(tgt_coords);
      pair.source.features = with_coords(src_features, src_coords, cfg.include_coords_in_features);
      pair.target.features = with_coords(tgt_features, tgt_coords, cfg.include_coords_in_features);
      pair.source.coords = std::move(src_coords);
      pair.target.coords = std::move(tgt_coords);
      pair.source.graph_id = tag + "_src";
      pair.target.graph_id = tag + "_tgt";
      pair.source.class_id = class_idx;
      pair.target.class_id = class_idx;
      for (int i = 0; i < ni; ++i) pair.gt_matching.emplace_back(i, i);
      return pair;
    } catch (const DataError& e) {
      last_error = e;  // degenerate draw: retry with fresh randomness
    }
  }
  throw DataError("gen_synthetic_pair: no valid draw for " + tag + " after " +
                  std::to_string(kMaxAttempts) + " attempts: " + last_error.what());
}

Dataset gen_dataset(const SyntheticConfig& cfg) {
  cfg.validate();
  Dataset ds;
  ds.config = cfg;
  ds.classes.reserve(cfg.n_classes);
  for (int c = 0; c < cfg.n_classes; ++c) {
    Dataset::ClassEntry entry;
    entry.class_id = c;
    entry.tmpl = make_class_template(cfg, c);
    entry.pairs.reserve(cfg.pairs_per_class);
    for (int p = 0; p < cfg.pairs_per_class; ++p)
      entry.pairs.push_back(gen_synthetic_pair(cfg, entry.tmpl, c, p));
    ds.classes.push_back(std::move(entry));
  }
  return ds;
}

}  // namespace gm
