#include "gm/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

#include "gm/augment.hpp"
#include "gm/errors.hpp"
#include "gm/evaluation.hpp"
#include "gm/rng.hpp"

namespace gm {

namespace {

// Sub-stream tags for deterministic derived generators.
constexpr std::uint64_t kStreamPool = 0x501aULL;
constexpr std::uint64_t kStreamShuffle = 0x5fabULL;
constexpr std::uint64_t kStreamSample = 0x5a3cULL;
constexpr std::uint64_t kStreamAugment = 0xa7b2ULL;

}  // namespace

void TrainConfig::validate() const {
  bias.validate();
  loss.validate();
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(early_stop_eps >= 0.0)) throw ConfigError("early_stop_eps must be >= 0");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must be in [0, 1)");
  if (!(eps_opt > 0.0)) throw ConfigError("eps_opt must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

Json train_config_to_json(const TrainConfig& cfg) {
  Json j;
  j["bias"] = Json{{"lambda", cfg.bias.lambda},
                   {"alpha", cfg.bias.alpha},
                   {"pool_size", cfg.bias.pool_size},
                   {"sampler", sampler_kind_name(cfg.bias.sampler)}};
  j["loss"] = loss_config_to_json(cfg.loss);
  j["learning_rate"] = cfg.learning_rate;
  j["batch_size"] = cfg.batch_size;
  j["max_epochs"] = cfg.max_epochs;
  j["early_stop_eps"] = cfg.early_stop_eps;
  j["patience"] = cfg.patience;
  j["seed"] = cfg.seed;
  j["beta1"] = cfg.beta1;
  j["beta2"] = cfg.beta2;
  j["eps_opt"] = cfg.eps_opt;
  j["threads"] = cfg.threads;
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  const Json& bias = require_key(j, "bias", "train config");
  cfg.bias.lambda = require_key(bias, "lambda", "bias config").get<double>();
  cfg.bias.alpha = require_key(bias, "alpha", "bias config").get<double>();
  cfg.bias.pool_size = require_key(bias, "pool_size", "bias config").get<int>();
  cfg.bias.sampler = sampler_kind_from_name(
      require_key(bias, "sampler", "bias config").get<std::string>());
  cfg.loss = loss_config_from_json(require_key(j, "loss", "train config"));
  cfg.learning_rate = require_key(j, "learning_rate", "train config").get<double>();
  cfg.batch_size = require_key(j, "batch_size", "train config").get<int>();
  cfg.max_epochs = require_key(j, "max_epochs", "train config").get<int>();
  cfg.early_stop_eps = require_key(j, "early_stop_eps", "train config").get<double>();
  cfg.patience = require_key(j, "patience", "train config").get<int>();
  cfg.seed = require_key(j, "seed", "train config").get<std::uint64_t>();
  cfg.beta1 = require_key(j, "beta1", "train config").get<double>();
  cfg.beta2 = require_key(j, "beta2", "train config").get<double>();
  cfg.eps_opt = require_key(j, "eps_opt", "train config").get<double>();
  cfg.threads = require_key(j, "threads", "train config").get<int>();
  cfg.validate();
  return cfg;
}

std::string TrainLog::to_csv() const {
  std::ostringstream out;
  out << "epoch,loss,l_node,l_match,train_f1,val_f1\n";
  for (const auto& row : epochs) {
    out << row.epoch << ',' << format_double(row.loss) << ','
        << format_double(row.l_node) << ',' << format_double(row.l_match) << ','
        << format_double(row.train_f1) << ',' << format_double(row.val_f1) << '\n';
  }
  return out.str();
}

void optimizer_step(Model& model, const std::vector<Eigen::MatrixXd>& grads,
                    AdamState& state, const TrainConfig& cfg) {
  std::vector<Eigen::MatrixXd*> params;
  model.for_each_param(
      [&params](const std::string&, Eigen::MatrixXd& p) { params.push_back(&p); });
  if (grads.size() != params.size()) {
    throw ShapeError("optimizer_step: gradient count does not match parameters");
  }
  if (state.m.empty()) {
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const Eigen::MatrixXd* p : params) {
      state.m.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      state.v.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) {
    throw ShapeError("optimizer_step: optimizer state does not match parameters");
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Eigen::MatrixXd& g = grads[k];
    if (g.rows() != params[k]->rows() || g.cols() != params[k]->cols()) {
      throw ShapeError("optimizer_step: gradient shape mismatch");
    }
    state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g;
    state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const Eigen::MatrixXd m_hat = state.m[k] / bc1;
    const Eigen::MatrixXd v_hat = state.v[k] / bc2;
    params[k]->array() -=
        cfg.learning_rate * m_hat.array() / (v_hat.array().sqrt() + cfg.eps_opt);
  }
}

namespace {

// Forward/backward result of one training slot (one graph, one pool entry).
struct SlotResult {
  bool contributed = false;
  bool non_finite = false;
  bool no_overlap = false;
  std::vector<Eigen::MatrixXd> grads;
  double loss = 0.0;
  double l_node = 0.0;
  double l_match = 0.0;
  double f1 = 0.0;
};

// Leaf bindings for one tape: encoder vars in for_each order plus w_aff.
struct BoundModel {
  EncoderVars enc;
  ad::Var w_aff;
  std::vector<ad::Var> leaves;  // same order as Model::for_each_param
};

BoundModel bind_model(ad::Tape& tape, const Model& model) {
  BoundModel bound{bind_encoder(tape, model.enc), ad::Var{}, {}};
  bound.w_aff = tape.leaf(model.w_aff);
  bound.leaves = {bound.enc.w_self1, bound.enc.w_neigh1, bound.enc.w_skip1,
                  bound.enc.b1,      bound.enc.w_self2,  bound.enc.w_neigh2,
                  bound.enc.b2,      bound.enc.w_p1,     bound.enc.bp1,
                  bound.enc.w_p2,    bound.enc.bp2,      bound.w_aff};
  return bound;
}

SlotResult run_slot(const Model& model, const TrainConfig& cfg, const Graph& g,
                    const PoolEntry& entry, Rng& aug_rng) {
  SlotResult result;
  AugmentedView view_a = apply(entry.first, g, aug_rng);
  AugmentedView view_b = apply(entry.second, g, aug_rng);
  const std::vector<std::pair<int, int>> correspondence =
      correspondence_pairs(view_a, view_b);
  if (correspondence.empty()) {
    result.no_overlap = true;
    return result;
  }
  const Eigen::MatrixXd g_self = self_ground_truth(view_a, view_b);

  try {
    ad::Tape tape;
    BoundModel bound = bind_model(tape, model);

    auto [h_a, readout_a] = encode_nodes(tape, bound.enc, view_a.graph);
    auto [h_b, readout_b] = encode_nodes(tape, bound.enc, view_b.graph);
    (void)readout_a;
    (void)readout_b;
    ad::Var z_a = project_nodes(tape, bound.enc, h_a);
    ad::Var z_b = project_nodes(tape, bound.enc, h_b);
    ad::Var l_node =
        node_contrastive_loss(tape, z_a, z_b, correspondence, cfg.loss.temperature);

    ad::Var logits = affinity(tape, h_a, bound.w_aff, h_b);
    ad::Var g_hat = sinkhorn(tape, logits, model.sinkhorn);
    ad::Var l_match = matching_loss(tape, g_hat, g_self, cfg.loss);
    ad::Var total = total_loss(tape, l_node, l_match);

    tape.backward(total);

    result.loss = tape.value(total)(0, 0);
    result.l_node = tape.value(l_node)(0, 0);
    result.l_match = tape.value(l_match)(0, 0);
    result.grads.reserve(bound.leaves.size());
    for (ad::Var leaf : bound.leaves) {
      result.grads.push_back(tape.grad(leaf));
    }

    const auto assignment = hungarian(tape.value(g_hat));
    result.f1 = f1_score(assignment, correspondence);
    result.contributed = true;
  } catch (const NonFiniteError&) {
    result.non_finite = true;
  }
  return result;
}

}  // namespace

TrainValSplit split_train_val(const Dataset& dataset, double val_fraction) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("split_train_val: val_fraction must lie strictly between 0 and 1");
  }
  TrainValSplit split;
  for (const auto& cls : dataset.classes) {
    const int n = static_cast<int>(cls.pairs.size());
    if (n < 2) {
      throw DataError("split_train_val: class " + std::to_string(cls.class_id) +
                      " has fewer than 2 pairs");
    }
    const int n_val = std::clamp(static_cast<int>(std::lround(val_fraction * n)), 1, n - 1);
    const int n_train = n - n_val;
    for (int k = 0; k < n_train; ++k) {
      split.train_pairs.push_back(cls.pairs[k]);
      split.train_graphs.push_back(cls.pairs[k].source);
      split.train_graphs.push_back(cls.pairs[k].target);
    }
    for (int k = n_train; k < n; ++k) {
      split.val_pairs.push_back(cls.pairs[k]);
    }
  }
  return split;
}

TrainResult train(Model model, const std::vector<Graph>& train_graphs,
                  const std::vector<GraphPair>& val_pairs, const TrainConfig& cfg) {
  cfg.validate();
  model.check_shapes();
  if (train_graphs.empty()) {
    throw DataError("train: empty training set");
  }
  if (val_pairs.empty()) {
    throw DataError("train: empty validation set (needed for early stopping)");
  }
  for (const Graph& g : train_graphs) {
    g.validate();
    if (g.feature_dim() != model.dims.in_dim) {
      throw ShapeError("train: graph feature dimension does not match the model");
    }
  }
  model.loss = cfg.loss;  // checkpoints describe the loss they were trained with

  Rng pool_rng(Rng::derive(cfg.seed, {kStreamPool}));
  Pool pool(cfg.bias, pool_rng);

  AdamState adam;
  TrainLog log;
  Model best_model = model;
  double best_val = -1.0;
  int best_epoch = 0;
  int epochs_since_improvement = 0;

  const int n_graphs = static_cast<int>(train_graphs.size());
  std::vector<int> order(train_graphs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(cfg.seed, {kStreamShuffle, static_cast<std::uint64_t>(epoch)}));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    double epoch_node = 0.0;
    double epoch_match = 0.0;
    double epoch_f1 = 0.0;
    std::int64_t n_contributing = 0;

    const int n_batches = (n_graphs + cfg.batch_size - 1) / cfg.batch_size;
    for (int batch = 0; batch < n_batches; ++batch) {
      const int begin = batch * cfg.batch_size;
      const int end = std::min(begin + cfg.batch_size, n_graphs);
      const int n_slots = end - begin;

      // Entry selection is serial so the draw order is fixed; each slot then
      // owns a derived generator, which keeps the batch reproducible for any
      // thread count.
      std::vector<int> entry_idx(n_slots);
      std::vector<Rng> slot_rng;
      slot_rng.reserve(n_slots);
      for (int s = 0; s < n_slots; ++s) {
        Rng sample_rng(Rng::derive(cfg.seed, {kStreamSample, static_cast<std::uint64_t>(epoch),
                                              static_cast<std::uint64_t>(batch),
                                              static_cast<std::uint64_t>(s)}));
        entry_idx[s] = pool.sample(sample_rng);
        slot_rng.emplace_back(Rng::derive(cfg.seed, {kStreamAugment, static_cast<std::uint64_t>(epoch),
                                                     static_cast<std::uint64_t>(batch),
                                                     static_cast<std::uint64_t>(s)}));
      }

      std::vector<SlotResult> results(n_slots);
      auto work = [&](int s) {
        results[s] = run_slot(model, cfg, train_graphs[order[begin + s]],
                              pool.entries()[entry_idx[s]], slot_rng[s]);
      };
      const int workers = std::min(cfg.threads, n_slots);
      if (workers <= 1) {
        for (int s = 0; s < n_slots; ++s) work(s);
      } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (int t = 0; t < workers; ++t) {
          threads.emplace_back([&, t]() {
            for (int s = t; s < n_slots; s += workers) work(s);
          });
        }
        for (auto& th : threads) th.join();
      }

      bool batch_non_finite = false;
      int n_ok = 0;
      for (const SlotResult& r : results) {
        if (r.non_finite) batch_non_finite = true;
        if (r.contributed) n_ok += 1;
      }
      if (batch_non_finite) {
        std::cerr << "warning: epoch " << epoch << " batch " << batch
                  << ": non-finite value; batch skipped\n";
        continue;
      }
      for (const SlotResult& r : results) {
        if (r.no_overlap) {
          std::cerr << "warning: epoch " << epoch << " batch " << batch
                    << ": views share no origin; slot skipped\n";
        }
      }
      if (n_ok == 0) {
        continue;
      }

      // Mean gradient over contributing slots, reduced in slot order.
      std::vector<Eigen::MatrixXd> grads;
      for (int s = 0; s < n_slots; ++s) {
        const SlotResult& r = results[s];
        if (!r.contributed) continue;
        if (grads.empty()) {
          grads = r.grads;
        } else {
          for (std::size_t k = 0; k < grads.size(); ++k) grads[k] += r.grads[k];
        }
      }
      const double inv = 1.0 / static_cast<double>(n_ok);
      for (Eigen::MatrixXd& g : grads) g *= inv;
      optimizer_step(model, grads, adam, cfg);

      for (int s = 0; s < n_slots; ++s) {
        const SlotResult& r = results[s];
        if (!r.contributed) continue;
        pool.record_score(entry_idx[s], r.f1);
        epoch_loss += r.loss;
        epoch_node += r.l_node;
        epoch_match += r.l_match;
        epoch_f1 += r.f1;
        n_contributing += 1;
      }
      pool.end_batch_update();
    }

    EpochStats stats;
    stats.epoch = epoch;
    if (n_contributing > 0) {
      const double inv = 1.0 / static_cast<double>(n_contributing);
      stats.loss = epoch_loss * inv;
      stats.l_node = epoch_node * inv;
      stats.l_match = epoch_match * inv;
      stats.train_f1 = epoch_f1 * inv;
    }
    stats.val_f1 = evaluate(model, val_pairs, EvalSetting::Intersection).mean_f1;
    stats.pool_entropy = pool.entropy();
    log.epochs.push_back(stats);

    if (stats.val_f1 > best_val + cfg.early_stop_eps) {
      best_val = stats.val_f1;
      best_model = model;
      best_epoch = epoch;
      epochs_since_improvement = 0;
    } else {
      epochs_since_improvement += 1;
      if (epochs_since_improvement >= cfg.patience) {
        break;
      }
    }
  }

  log.best_epoch = best_epoch;
  log.best_val_f1 = best_val;
  best_model.loss = cfg.loss;
  return TrainResult{std::move(best_model), std::move(pool), std::move(log)};
}

}  // namespace gm
