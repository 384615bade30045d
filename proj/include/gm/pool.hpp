#pragma once

#include <cstdint>
#include <vector>

#include "gm/augment.hpp"
#include "gm/json_util.hpp"
#include "gm/rng.hpp"

namespace gm {

enum class SamplerKind { Uniform, Bias };

const char* sampler_kind_name(SamplerKind k);
SamplerKind sampler_kind_from_name(const std::string& name);  // throws ConfigError

// Adaptive-sampler configuration. With the Bias sampler, each entry's weight is
// driven toward e^{alpha*(1-phi)} (phi = running mean matching score), so
// poorly matched augmentation pairs are drawn more often; the Uniform sampler
// keeps selection flat and never touches weights.
struct BiasConfig {
  double lambda = 0.8;   // momentum, in [0, 1]
  double alpha = 3.0;    // sharpness, >= 1
  int pool_size = 512;   // >= 1
  SamplerKind sampler = SamplerKind::Bias;

  void validate() const;  // throws ConfigError
};

// One augmentation pair in the pool with its sampling weight and running
// performance statistics.
struct PoolEntry {
  AugSpec first;
  AugSpec second;
  double weight = 0.0;
  double perf_sum = 0.0;
  std::int64_t perf_count = 0;
  std::vector<double> batch_scores;  // transient, folded at the batch boundary

  bool applied() const { return perf_count > 0; }
  double phi() const { return applied() ? perf_sum / static_cast<double>(perf_count) : 0.0; }
};

class Pool {
 public:
  Pool() = default;

  // Builds pool_size entries: kind pair uniform over the ordered product of
  // the nine kinds minus {(Identity, Identity), (Mixup, Mixup)}, parameters
  // uniform within their ranges, every weight e^alpha.
  Pool(const BiasConfig& cfg, Rng& rng);

  const BiasConfig& config() const { return cfg_; }
  const std::vector<PoolEntry>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }

  // Draws an entry index: weight-proportional for Bias, flat for Uniform.
  int sample(Rng& rng) const;

  // Buffers a matching score in [0, 1] for the entry (ScoreOutOfRangeError).
  void record_score(int idx, double score);

  // Batch boundary: folds buffered scores into (perf_sum, perf_count); with
  // the Bias sampler every applied entry then takes one momentum step
  //   weight <- lambda*weight + (1-lambda)*e^{alpha*(1-phi)}
  // Never-applied entries keep weight e^alpha. Asserts the [1, e^alpha]
  // weight bound afterwards.
  void end_batch_update();

  // Normalized sampling distribution (sums to 1).
  std::vector<double> probabilities() const;

  // Shannon entropy (nats) of the sampling distribution.
  double entropy() const;

  Json to_json() const;
  static Pool from_json(const Json& j);  // throws DataError

 private:
  BiasConfig cfg_;
  std::vector<PoolEntry> entries_;
};

// One momentum weight step in isolation (used by the pool and its tests).
double bias_weight_step(double weight, double phi, double lambda, double alpha);

}  // namespace gm
