// graphmatch: self-supervised graph-matching toolkit.
//
// Subcommands: gen (synthetic dataset), train (contrastive pre-training with
// adaptive augmentation sampling), eval (frozen-model or baseline matching),
// inspect-pool (augmentation-pair weights of a checkpoint).
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gm/dataset_io.hpp"
#include "gm/errors.hpp"
#include "gm/evaluation.hpp"
#include "gm/json_util.hpp"
#include "gm/model.hpp"
#include "gm/run_config.hpp"
#include "gm/spectral.hpp"
#include "gm/synthetic.hpp"
#include "gm/training.hpp"

namespace {

int run_gen(const std::string& config_path, const std::string& out_path) {
  gm::RunConfig cfg = gm::load_run_config(config_path);
  gm::Dataset dataset = gm::gen_dataset(cfg.synthetic);
  gm::save_dataset(dataset, out_path);
  gm::write_config_echo(out_path + ".config.json", cfg);

  int min_nodes = 0;
  int max_nodes = 0;
  bool first = true;
  for (const gm::Graph& g : dataset.all_graphs()) {
    const int n = g.num_nodes();
    min_nodes = first ? n : std::min(min_nodes, n);
    max_nodes = first ? n : std::max(max_nodes, n);
    first = false;
  }
  std::cout << "wrote " << out_path << ": " << dataset.classes.size()
            << " classes, " << dataset.num_pairs() << " pairs, node counts "
            << min_nodes << ".." << max_nodes << "\n";
  return 0;
}

int run_train(const std::string& data_path, const std::string& config_path,
              const std::string& out_path, const std::string& log_path,
              const std::string& sampler, int threads) {
  gm::RunConfig cfg = gm::load_run_config(config_path);
  if (!sampler.empty()) {
    cfg.train.bias.sampler = gm::sampler_kind_from_name(sampler);
  }
  if (threads > 0) {
    cfg.train.threads = threads;
  }

  gm::Dataset dataset = gm::load_dataset(data_path);
  gm::TrainValSplit split = gm::split_train_val(dataset, cfg.val_fraction);

  gm::Model init = gm::make_model(cfg.seed, cfg.encoder, cfg.sinkhorn, cfg.train.loss);
  gm::TrainResult result =
      gm::train(std::move(init), split.train_graphs, split.val_pairs, cfg.train);

  gm::save_checkpoint(out_path, result.model, &result.pool);
  gm::write_json_file(out_path + ".pool.json", result.pool.to_json());
  gm::write_text_file(log_path, result.log.to_csv());
  gm::write_config_echo(out_path + ".config.json", cfg);

  std::cout << "trained on " << split.train_graphs.size() << " graphs ("
            << split.val_pairs.size() << " validation pairs); best val F1 "
            << gm::format_double(result.log.best_val_f1) << " at epoch "
            << result.log.best_epoch << "; wrote " << out_path << "\n";
  return 0;
}

int run_eval(const std::string& data_path, const std::string& model_path,
             const std::string& setting_name, const std::string& out_path,
             const std::string& baseline, std::uint64_t seed) {
  const gm::EvalSetting setting = gm::eval_setting_from_name(setting_name);
  gm::Dataset dataset = gm::load_dataset(data_path);
  const std::vector<gm::GraphPair> pairs = dataset.all_pairs();

  gm::EvalReport report;
  if (baseline.empty()) {
    if (model_path.empty()) {
      throw gm::ConfigError("eval: --model is required unless --baseline is given");
    }
    gm::Checkpoint ck = gm::load_checkpoint(model_path);
    report = gm::evaluate(ck.model, pairs, setting);
  } else if (baseline == "sm") {
    report = gm::evaluate_spectral(pairs, setting);
  } else if (baseline == "random") {
    report = gm::evaluate_random(pairs, setting, seed);
  } else {
    throw gm::ConfigError("eval: unknown baseline '" + baseline +
                          "' (expected 'sm' or 'random')");
  }

  gm::write_text_file(out_path, gm::eval_report_csv(report));
  gm::write_json_file(out_path + ".summary.json", gm::eval_report_to_json(report));
  std::cout << report.method << " " << gm::eval_setting_name(report.setting)
            << " mean F1 " << gm::format_double(report.mean_f1) << " +/- "
            << gm::format_double(report.std_f1) << " over "
            << report.per_pair_f1.size() << " pairs; wrote " << out_path << "\n";
  return 0;
}

int run_inspect_pool(const std::string& model_path, const std::string& out_path) {
  gm::Checkpoint ck = gm::load_checkpoint(model_path);
  if (!ck.pool.has_value()) {
    throw gm::DataError("inspect-pool: checkpoint has no pool state");
  }
  const gm::Pool& pool = *ck.pool;

  std::vector<int> order(pool.entries().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&pool](int a, int b) {
    return pool.entries()[a].weight > pool.entries()[b].weight;
  });

  gm::Json entries = gm::Json::array();
  for (int idx : order) {
    const gm::PoolEntry& e = pool.entries()[idx];
    entries.push_back(gm::Json{{"entry", idx},
                               {"weight", e.weight},
                               {"phi", e.phi()},
                               {"times_applied", e.perf_count},
                               {"first", gm::aug_spec_to_json(e.first)},
                               {"second", gm::aug_spec_to_json(e.second)}});
  }
  gm::Json j;
  j["pool_size"] = pool.size();
  j["sampler"] = gm::sampler_kind_name(pool.config().sampler);
  j["entropy"] = pool.entropy();
  j["entries_by_weight"] = std::move(entries);
  gm::write_json_file(out_path, j);

  std::cout << "pool of " << pool.size() << " entries (sampler "
            << gm::sampler_kind_name(pool.config().sampler) << ", entropy "
            << gm::format_double(pool.entropy()) << "); wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphmatch: self-supervised graph matching toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_path;
  std::string model_path;
  std::string out_path;
  std::string log_path;
  std::string sampler;
  std::string setting = "intsec";
  std::string baseline;
  std::uint64_t seed = 7;
  int threads = 0;

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--config", config_path, "Run config JSON")->required();
  gen->add_option("--out", out_path, "Output dataset path")->required();

  CLI::App* train = app.add_subcommand("train", "Pre-train a matching model");
  train->add_option("--data", data_path, "Dataset path")->required();
  train->add_option("--config", config_path, "Run config JSON")->required();
  train->add_option("--out", model_path, "Output checkpoint path")->required();
  train->add_option("--log", log_path, "Output per-epoch CSV path")->required();
  train->add_option("--sampler", sampler, "Sampler override: uniform|bias")
      ->check(CLI::IsMember({"uniform", "bias"}));
  train->add_option("--threads", threads, "Worker cap for batch slots");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate on a dataset");
  eval->add_option("--data", data_path, "Dataset path")->required();
  eval->add_option("--model", model_path, "Checkpoint path");
  eval->add_option("--setting", setting, "Evaluation setting: intsec|unfilt")
      ->check(CLI::IsMember({"intsec", "unfilt"}));
  eval->add_option("--out", out_path, "Output CSV path")->required();
  eval->add_option("--baseline", baseline, "Evaluate a baseline: sm|random")
      ->check(CLI::IsMember({"sm", "random"}));
  eval->add_option("--seed", seed, "Seed for the random baseline");

  CLI::App* inspect = app.add_subcommand("inspect-pool", "Dump a checkpoint's pool");
  inspect->add_option("--model", model_path, "Checkpoint path")->required();
  inspect->add_option("--out", out_path, "Output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad flags are config errors
  }

  try {
    if (gen->parsed()) {
      return run_gen(config_path, out_path);
    }
    if (train->parsed()) {
      return run_train(data_path, config_path, model_path, log_path, sampler, threads);
    }
    if (eval->parsed()) {
      return run_eval(data_path, model_path, setting, out_path, baseline, seed);
    }
    if (inspect->parsed()) {
      return run_inspect_pool(model_path, out_path);
    }
  } catch (const gm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gm::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const gm::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
