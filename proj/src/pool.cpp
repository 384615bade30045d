#include "gm/pool.hpp"

#include <algorithm>
#include <cmath>

#include "gm/errors.hpp"

namespace gm {

namespace {

// Sampling caps for the integer parameters whose ranges are open-ended
// (subset size >= 2, edges per dummy >= 1).
constexpr int kSubsetSizeMax = 5;
constexpr int kEdgesPerDummyMax = 3;

AugSpec sample_spec(AugKind kind, Rng& rng) {
  AugSpec s;
  s.kind = kind;
  switch (kind) {
    case AugKind::Identity:
      break;
    case AugKind::NodeInsertion:
    case AugKind::NodeReplacement:
      s.fraction = rng.uniform(0.1, 0.9);
      s.subset_size = rng.uniform_int(2, kSubsetSizeMax);
      s.aggregator = rng.below(2) == 0 ? Aggregator::Mean : Aggregator::Max;
      s.edges_per_dummy = rng.uniform_int(1, kEdgesPerDummyMax);
      break;
    case AugKind::EdgeRemoval:
    case AugKind::NodeDropping:
    case AugKind::FeatureMasking:
      s.fraction = rng.uniform(0.1, 0.9);
      break;
    case AugKind::FeatureScaleUnivariate:
    case AugKind::FeatureScaleMultivariate:
      s.scale_lo = rng.uniform(0.2, 0.8);
      s.scale_hi = rng.uniform(1.2, 1.8);
      break;
    case AugKind::Mixup:
      s.mix = rng.uniform(0.1, 0.9);
      break;
  }
  s.validate();
  return s;
}

bool excluded_kind_pair(AugKind a, AugKind b) {
  return (a == AugKind::Identity && b == AugKind::Identity) ||
         (a == AugKind::Mixup && b == AugKind::Mixup);
}

}  // namespace

const char* sampler_kind_name(SamplerKind k) {
  return k == SamplerKind::Uniform ? "uniform" : "bias";
}

SamplerKind sampler_kind_from_name(const std::string& name) {
  if (name == "uniform") return SamplerKind::Uniform;
  if (name == "bias") return SamplerKind::Bias;
  throw ConfigError("unknown sampler kind: '" + name + "' (expected 'uniform' or 'bias')");
}

void BiasConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("sampler: lambda must be in [0, 1]");
  if (!(alpha >= 1.0)) throw ConfigError("sampler: alpha must be >= 1");
  if (pool_size < 1) throw ConfigError("sampler: pool_size must be >= 1");
}

double bias_weight_step(double weight, double phi, double lambda, double alpha) {
  return lambda * weight + (1.0 - lambda) * std::exp(alpha * (1.0 - phi));
}

Pool::Pool(const BiasConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg.validate();
  entries_.reserve(cfg.pool_size);
  const double w0 = std::exp(cfg.alpha);
  for (int i = 0; i < cfg.pool_size; ++i) {
    AugKind a, b;
    do {
      a = static_cast<AugKind>(rng.below(kNumAugKinds));
      b = static_cast<AugKind>(rng.below(kNumAugKinds));
    } while (excluded_kind_pair(a, b));
    PoolEntry e;
    e.first = sample_spec(a, rng);
    e.second = sample_spec(b, rng);
    e.weight = w0;
    entries_.push_back(std::move(e));
  }
}

int Pool::sample(Rng& rng) const {
  if (entries_.empty()) throw ConfigError("sample on an empty pool");
  if (cfg_.sampler == SamplerKind::Uniform)
    return static_cast<int>(rng.below(entries_.size()));
  double total = 0.0;
  for (const PoolEntry& e : entries_) total += e.weight;
  const double u = rng.uniform01() * total;
  double cum = 0.0;
  for (int i = 0; i < size(); ++i) {
    cum += entries_[i].weight;
    if (u < cum) return i;
  }
  return size() - 1;  // guard against accumulated rounding
}

void Pool::record_score(int idx, double score) {
  if (idx < 0 || idx >= size()) throw NumericError("record_score: entry index out of range");
  if (!(score >= 0.0 && score <= 1.0))
    throw ScoreOutOfRangeError("record_score: score " + std::to_string(score) +
                               " outside [0, 1]");
  entries_[idx].batch_scores.push_back(score);
}

void Pool::end_batch_update() {
  const double w_max = std::exp(cfg_.alpha);
  for (PoolEntry& e : entries_) {
    for (double s : e.batch_scores) {
      e.perf_sum += s;
      e.perf_count += 1;
    }
    e.batch_scores.clear();
    if (cfg_.sampler != SamplerKind::Bias) continue;
    if (!e.applied()) continue;  // frozen until first applied
    e.weight = bias_weight_step(e.weight, e.phi(), cfg_.lambda, cfg_.alpha);
    if (!(e.weight >= 1.0 - 1e-9 && e.weight <= w_max + 1e-9))
      throw NumericError("sampler weight " + std::to_string(e.weight) +
                         " escaped its bound [1, e^alpha]");
  }
}

std::vector<double> Pool::probabilities() const {
  std::vector<double> p(entries_.size());
  double total = 0.0;
  for (const PoolEntry& e : entries_) total += e.weight;
  for (std::size_t i = 0; i < entries_.size(); ++i) p[i] = entries_[i].weight / total;
  return p;
}

double Pool::entropy() const {
  double h = 0.0;
  for (double p : probabilities())
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

Json Pool::to_json() const {
  Json j;
  j["lambda"] = cfg_.lambda;
  j["alpha"] = cfg_.alpha;
  j["pool_size"] = cfg_.pool_size;
  j["sampler"] = sampler_kind_name(cfg_.sampler);
  Json entries = Json::array();
  for (const PoolEntry& e : entries_) {
    Json ej;
    ej["first"] = aug_spec_to_json(e.first);
    ej["second"] = aug_spec_to_json(e.second);
    ej["weight"] = e.weight;
    ej["perf_sum"] = e.perf_sum;
    ej["perf_count"] = e.perf_count;
    entries.push_back(std::move(ej));
  }
  j["entries"] = std::move(entries);
  return j;
}

Pool Pool::from_json(const Json& j) {
  Pool p;
  const std::string where = "pool";
  p.cfg_.lambda = require_key(j, "lambda", where).get<double>();
  p.cfg_.alpha = require_key(j, "alpha", where).get<double>();
  p.cfg_.pool_size = require_key(j, "pool_size", where).get<int>();
  p.cfg_.sampler = sampler_kind_from_name(require_key(j, "sampler", where).get<std::string>());
  p.cfg_.validate();
  const Json& entries = require_key(j, "entries", where);
  if (!entries.is_array()) throw DataError("pool: 'entries' must be an array");
  for (const auto& ej : entries) {
    PoolEntry e;
    e.first = aug_spec_from_json(require_key(ej, "first", where));
    e.second = aug_spec_from_json(require_key(ej, "second", where));
    e.weight = require_key(ej, "weight", where).get<double>();
    e.perf_sum = require_key(ej, "perf_sum", where).get<double>();
    e.perf_count = require_key(ej, "perf_count", where).get<std::int64_t>();
    if (excluded_kind_pair(e.first.kind, e.second.kind))
      throw DataError("pool: entry uses an excluded kind pair");
    p.entries_.push_back(std::move(e));
  }
  return p;
}

}  // namespace gm
