#include "gm/run_config.hpp"

#include <initializer_list>
#include <string>

#include "gm/errors.hpp"
#include "gm/pool.hpp"

namespace gm {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) {
    throw ConfigError("config: '" + where + "' must be an object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read_if_present(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    out = it->get<T>();
  }
}

}  // namespace

int RunConfig::generated_feature_width() const {
  return synthetic.feature_dim + (synthetic.include_coords_in_features ? 2 : 0);
}

void RunConfig::validate() const {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("config: val_fraction must lie strictly between 0 and 1");
  }
  synthetic.validate();
  encoder.validate();
  sinkhorn.validate();
  train.validate();
  if (encoder.in_dim != generated_feature_width()) {
    throw ConfigError(
        "config: encoder.in_dim (" + std::to_string(encoder.in_dim) +
        ") does not match the generated feature width (" +
        std::to_string(generated_feature_width()) + ")");
  }
}

RunConfig run_config_from_json(const Json& j) {
  check_keys(j, {"seed", "val_fraction", "synthetic", "encoder", "sinkhorn", "train"},
             "the top level");
  RunConfig cfg;
  read_if_present(j, "seed", cfg.seed);
  read_if_present(j, "val_fraction", cfg.val_fraction);

  if (auto it = j.find("synthetic"); it != j.end()) {
    const Json& s = *it;
    check_keys(s,
               {"n_inliers", "n_outliers_source", "n_outliers_target", "feature_dim",
                "coord_noise_sigma", "feature_noise_sigma", "n_classes",
                "pairs_per_class", "include_coords_in_features"},
               "'synthetic'");
    read_if_present(s, "n_inliers", cfg.synthetic.n_inliers);
    read_if_present(s, "n_outliers_source", cfg.synthetic.n_outliers_source);
    read_if_present(s, "n_outliers_target", cfg.synthetic.n_outliers_target);
    read_if_present(s, "feature_dim", cfg.synthetic.feature_dim);
    read_if_present(s, "coord_noise_sigma", cfg.synthetic.coord_noise_sigma);
    read_if_present(s, "feature_noise_sigma", cfg.synthetic.feature_noise_sigma);
    read_if_present(s, "n_classes", cfg.synthetic.n_classes);
    read_if_present(s, "pairs_per_class", cfg.synthetic.pairs_per_class);
    read_if_present(s, "include_coords_in_features",
                    cfg.synthetic.include_coords_in_features);
  }

  bool in_dim_given = false;
  if (auto it = j.find("encoder"); it != j.end()) {
    const Json& e = *it;
    check_keys(e, {"in_dim", "hidden", "proj"}, "'encoder'");
    in_dim_given = e.find("in_dim") != e.end();
    read_if_present(e, "in_dim", cfg.encoder.in_dim);
    read_if_present(e, "hidden", cfg.encoder.hidden);
    read_if_present(e, "proj", cfg.encoder.proj);
  }
  if (!in_dim_given) {
    cfg.encoder.in_dim = cfg.generated_feature_width();
  }

  if (auto it = j.find("sinkhorn"); it != j.end()) {
    const Json& s = *it;
    check_keys(s, {"tau", "iterations", "epsilon"}, "'sinkhorn'");
    read_if_present(s, "tau", cfg.sinkhorn.tau);
    read_if_present(s, "iterations", cfg.sinkhorn.iterations);
    read_if_present(s, "epsilon", cfg.sinkhorn.epsilon);
  }

  if (auto it = j.find("train"); it != j.end()) {
    const Json& t = *it;
    check_keys(t,
               {"bias", "loss", "learning_rate", "batch_size", "max_epochs",
                "early_stop_eps", "patience", "beta1", "beta2", "eps_opt", "threads"},
               "'train'");
    if (auto bit = t.find("bias"); bit != t.end()) {
      const Json& b = *bit;
      check_keys(b, {"lambda", "alpha", "pool_size", "sampler"}, "'train.bias'");
      read_if_present(b, "lambda", cfg.train.bias.lambda);
      read_if_present(b, "alpha", cfg.train.bias.alpha);
      read_if_present(b, "pool_size", cfg.train.bias.pool_size);
      if (auto sit = b.find("sampler"); sit != b.end()) {
        cfg.train.bias.sampler = sampler_kind_from_name(sit->get<std::string>());
      }
    }
    if (auto lit = t.find("loss"); lit != t.end()) {
      const Json& l = *lit;
      check_keys(l, {"temperature", "matching_loss_kind", "permutation_balanced"},
                 "'train.loss'");
      read_if_present(l, "temperature", cfg.train.loss.temperature);
      if (auto kit = l.find("matching_loss_kind"); kit != l.end()) {
        cfg.train.loss.matching_loss_kind =
            matching_loss_kind_from_name(kit->get<std::string>());
      }
      read_if_present(l, "permutation_balanced", cfg.train.loss.permutation_balanced);
    }
    read_if_present(t, "learning_rate", cfg.train.learning_rate);
    read_if_present(t, "batch_size", cfg.train.batch_size);
    read_if_present(t, "max_epochs", cfg.train.max_epochs);
    read_if_present(t, "early_stop_eps", cfg.train.early_stop_eps);
    read_if_present(t, "patience", cfg.train.patience);
    read_if_present(t, "beta1", cfg.train.beta1);
    read_if_present(t, "beta2", cfg.train.beta2);
    read_if_present(t, "eps_opt", cfg.train.eps_opt);
    read_if_present(t, "threads", cfg.train.threads);
  }

  cfg.synthetic.seed = cfg.seed;
  cfg.train.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

Json run_config_to_json(const RunConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["val_fraction"] = cfg.val_fraction;
  Json s;
  s["n_inliers"] = cfg.synthetic.n_inliers;
  s["n_outliers_source"] = cfg.synthetic.n_outliers_source;
  s["n_outliers_target"] = cfg.synthetic.n_outliers_target;
  s["feature_dim"] = cfg.synthetic.feature_dim;
  s["coord_noise_sigma"] = cfg.synthetic.coord_noise_sigma;
  s["feature_noise_sigma"] = cfg.synthetic.feature_noise_sigma;
  s["n_classes"] = cfg.synthetic.n_classes;
  s["pairs_per_class"] = cfg.synthetic.pairs_per_class;
  s["include_coords_in_features"] = cfg.synthetic.include_coords_in_features;
  j["synthetic"] = std::move(s);
  j["encoder"] = Json{{"in_dim", cfg.encoder.in_dim},
                      {"hidden", cfg.encoder.hidden},
                      {"proj", cfg.encoder.proj}};
  j["sinkhorn"] = sinkhorn_config_to_json(cfg.sinkhorn);
  Json t = train_config_to_json(cfg.train);
  t.erase("seed");  // mirrored from the top level
  j["train"] = std::move(t);
  return j;
}

RunConfig load_run_config(const std::string& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const DataError& e) {
    // A broken config file is a config error for exit-code purposes.
    throw ConfigError(e.what());
  }
  return run_config_from_json(j);
}

void write_config_echo(const std::string& path, const RunConfig& cfg) {
  write_json_file(path, run_config_to_json(cfg));
}

}  // namespace gm
