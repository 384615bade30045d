#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gm/graph.hpp"
#include "gm/json_util.hpp"
#include "gm/losses.hpp"
#include "gm/model.hpp"
#include "gm/pool.hpp"
#include "gm/synthetic.hpp"

namespace gm {

struct TrainConfig {
  BiasConfig bias;
  LossConfig loss;
  double learning_rate = 5e-3;
  int batch_size = 16;
  int max_epochs = 200;
  double early_stop_eps = 0.001;  // minimum validation-F1 improvement
  int patience = 10;              // epochs without improvement before stopping
  std::uint64_t seed = 7;
  double beta1 = 0.9;    // first-moment decay
  double beta2 = 0.999;  // second-moment decay
  double eps_opt = 1e-8;
  int threads = 1;  // worker cap for the per-slot forward/backward passes

  void validate() const;  // throws ConfigError
};

Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

// Per-epoch training record. `pool_entropy` is diagnostic only and is not
// part of the CSV schema.
struct EpochStats {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double l_node = 0.0;
  double l_match = 0.0;
  double train_f1 = 0.0;
  double val_f1 = 0.0;
  double pool_entropy = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  double best_val_f1 = 0.0;

  // CSV columns: epoch,loss,l_node,l_match,train_f1,val_f1
  std::string to_csv() const;
};

// Adaptive moment estimation with bias correction. State vectors follow the
// model's fixed parameter order and are created lazily on the first step.
struct AdamState {
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  long step = 0;
};

void optimizer_step(Model& model, const std::vector<Eigen::MatrixXd>& grads,
                    AdamState& state, const TrainConfig& cfg);

struct TrainResult {
  Model model;  // parameters of the best-validation epoch
  Pool pool;    // sampling pool state at the end of training
  TrainLog log;
};

// Deterministic per-class split: the last round(val_fraction * n) pairs of
// each class (at least 1, at most n - 1) become validation pairs; the
// training list holds the remaining pairs' individual graphs (source, then
// target, in dataset order). Every class needs >= 2 pairs.
struct TrainValSplit {
  std::vector<Graph> train_graphs;
  std::vector<GraphPair> train_pairs;
  std::vector<GraphPair> val_pairs;
};

TrainValSplit split_train_val(const Dataset& dataset, double val_fraction);

// Self-supervised pre-training. Per graph in a mini-batch: draw one
// augmentation pair from the pool, build both views and their self ground
// truth, and accumulate the contrastive plus matching loss. Per batch: one
// optimizer step over the mean gradient, then the discrete-match F1 of every
// slot is folded into the pool. Per epoch: validation F1 on `val_pairs`
// (intersection setting) drives early stopping; the best-validation
// parameters are returned. `val_pairs` ground truth is used only for model
// selection; no correspondence labels and no class ids feed the gradient
// path. A non-finite value in any slot skips that batch with a note on
// stderr. A slot whose two views share no origin (empty self ground truth)
// is skipped with a note; this does not abort the batch.
TrainResult train(Model model, const std::vector<Graph>& train_graphs,
                  const std::vector<GraphPair>& val_pairs, const TrainConfig& cfg);

}  // namespace gm
