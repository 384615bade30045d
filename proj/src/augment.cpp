#include "gm/augment.hpp"

#include <algorithm>
#include <cmath>

#include "gm/errors.hpp"

namespace gm {

namespace {

const char* kKindNames[kNumAugKinds] = {
    "identity",
    "node_insertion",
    "node_replacement",
    "edge_removal",
    "feature_scale_univariate",
    "feature_scale_multivariate",
    "node_dropping",
    "feature_masking",
    "mixup",
};

// Fraction-of-nodes to count, by ceiling. The tiny slack absorbs the rounding
// of products like 0.3 * 10 that are integers in exact arithmetic.
int count_from_fraction(double fraction, int n) {
  return static_cast<int>(std::ceil(fraction * n - 1e-9));
}

bool uses_fraction(AugKind k) {
  return k == AugKind::NodeInsertion || k == AugKind::NodeReplacement ||
         k == AugKind::EdgeRemoval || k == AugKind::NodeDropping || k == AugKind::FeatureMasking;
}

bool uses_dummies(AugKind k) {
  return k == AugKind::NodeInsertion || k == AugKind::NodeReplacement;
}

Eigen::RowVectorXd aggregate_rows(const Eigen::MatrixXd& features, const std::vector<int>& subset,
                                  Aggregator aggr) {
  Eigen::RowVectorXd out = features.row(subset[0]);
  for (std::size_t i = 1; i < subset.size(); ++i) {
    if (aggr == Aggregator::Mean)
      out += features.row(subset[i]);
    else
      out = out.cwiseMax(features.row(subset[i]));
  }
  if (aggr == Aggregator::Mean) out /= static_cast<double>(subset.size());
  return out;
}

// Appends `count` dummy nodes to `g` (features aggregated over a random node
// subset of the base nodes, a few attachment edges to base nodes outside that
// subset). Base nodes are g's current nodes; draw order per dummy is subset
// first, then attachments.
void insert_dummies(Graph& g, int count, const AugSpec& spec, Rng& rng) {
  const int base = g.num_nodes();
  const int total = base + count;
  Eigen::MatrixXd features(total, g.feature_dim());
  features.topRows(base) = g.features;
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(total, total);
  adjacency.topLeftCorner(base, base) = g.adjacency;

  const int k = std::min(spec.subset_size, base);
  for (int d = 0; d < count; ++d) {
    std::vector<int> subset = rng.sample_without_replacement(base, k);
    std::sort(subset.begin(), subset.end());
    features.row(base + d) = aggregate_rows(g.features, subset, spec.aggregator);

    std::vector<int> candidates;
    candidates.reserve(base - k);
    for (int v = 0; v < base; ++v)
      if (!std::binary_search(subset.begin(), subset.end(), v)) candidates.push_back(v);
    const int e = std::min<int>(spec.edges_per_dummy, static_cast<int>(candidates.size()));
    for (int pick : rng.sample_without_replacement(static_cast<int>(candidates.size()), e)) {
      const int v = candidates[pick];
      adjacency(base + d, v) = 1.0;
      adjacency(v, base + d) = 1.0;
    }
  }
  g.features = std::move(features);
  g.adjacency = std::move(adjacency);
  g.coords.reset();  // dummies have no position
}

}  // namespace

const char* aug_kind_name(AugKind k) { return kKindNames[static_cast<int>(k)]; }

AugKind aug_kind_from_name(const std::string& name) {
  for (int i = 0; i < kNumAugKinds; ++i)
    if (name == kKindNames[i]) return static_cast<AugKind>(i);
  throw InvalidSpecError("unknown augmentation kind: '" + name + "'");
}

void AugSpec::validate() const {
  if (uses_fraction(kind) && (fraction < 0.1 || fraction > 0.9))
    throw InvalidSpecError(std::string(aug_kind_name(kind)) + ": fraction must be in [0.1, 0.9]");
  if (uses_dummies(kind)) {
    if (subset_size < 2)
      throw InvalidSpecError(std::string(aug_kind_name(kind)) + ": subset_size must be >= 2");
    if (edges_per_dummy < 1)
      throw InvalidSpecError(std::string(aug_kind_name(kind)) + ": edges_per_dummy must be >= 1");
  }
  if (kind == AugKind::FeatureScaleUnivariate || kind == AugKind::FeatureScaleMultivariate) {
    if (scale_lo < 0.2 || scale_lo > 0.8)
      throw InvalidSpecError("feature scale: lower bound must be in [0.2, 0.8]");
    if (scale_hi < 1.2 || scale_hi > 1.8)
      throw InvalidSpecError("feature scale: upper bound must be in [1.2, 1.8]");
  }
  if (kind == AugKind::Mixup && (mix < 0.1 || mix > 0.9))
    throw InvalidSpecError("mixup: coefficient must be in [0.1, 0.9]");
}

Json aug_spec_to_json(const AugSpec& s) {
  Json j;
  j["kind"] = aug_kind_name(s.kind);
  switch (s.kind) {
    case AugKind::Identity:
      break;
    case AugKind::NodeInsertion:
    case AugKind::NodeReplacement:
      j["fraction"] = s.fraction;
      j["subset_size"] = s.subset_size;
      j["aggregator"] = s.aggregator == Aggregator::Mean ? "mean" : "max";
      j["edges_per_dummy"] = s.edges_per_dummy;
      break;
    case AugKind::EdgeRemoval:
    case AugKind::NodeDropping:
    case AugKind::FeatureMasking:
      j["fraction"] = s.fraction;
      break;
    case AugKind::FeatureScaleUnivariate:
    case AugKind::FeatureScaleMultivariate:
      j["scale_lo"] = s.scale_lo;
      j["scale_hi"] = s.scale_hi;
      break;
    case AugKind::Mixup:
      j["mix"] = s.mix;
      break;
  }
  return j;
}

AugSpec aug_spec_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("augmentation spec: expected an object");
  AugSpec s;
  const Json& kind = require_key(j, "kind", "augmentation spec");
  if (!kind.is_string()) throw DataError("augmentation spec: 'kind' must be a string");
  s.kind = aug_kind_from_name(kind.get<std::string>());
  auto num = [&](const char* key) {
    return require_key(j, key, "augmentation spec").get<double>();
  };
  switch (s.kind) {
    case AugKind::Identity:
      break;
    case AugKind::NodeInsertion:
    case AugKind::NodeReplacement: {
      s.fraction = num("fraction");
      s.subset_size = static_cast<int>(num("subset_size"));
      s.edges_per_dummy = static_cast<int>(num("edges_per_dummy"));
      const std::string aggr = require_key(j, "aggregator", "augmentation spec").get<std::string>();
      if (aggr == "mean")
        s.aggregator = Aggregator::Mean;
      else if (aggr == "max")
        s.aggregator = Aggregator::Max;
      else
        throw InvalidSpecError("unknown aggregator: '" + aggr + "'");
      break;
    }
    case AugKind::EdgeRemoval:
    case AugKind::NodeDropping:
    case AugKind::FeatureMasking:
      s.fraction = num("fraction");
      break;
    case AugKind::FeatureScaleUnivariate:
    case AugKind::FeatureScaleMultivariate:
      s.scale_lo = num("scale_lo");
      s.scale_hi = num("scale_hi");
      break;
    case AugKind::Mixup:
      s.mix = num("mix");
      break;
  }
  s.validate();
  return s;
}

AugmentedView apply(const AugSpec& spec, const Graph& g, Rng& rng, AugTrace* trace) {
  spec.validate();
  g.validate();
  const int n = g.num_nodes();

  AugmentedView view;
  AugTrace local;

  switch (spec.kind) {
    case AugKind::Identity: {
      view.graph = g;
      for (int i = 0; i < n; ++i) view.origin_of.emplace_back(i);
      break;
    }
    case AugKind::NodeInsertion: {
      const int dummies = count_from_fraction(spec.fraction, n);
      view.graph = g;
      insert_dummies(view.graph, dummies, spec, rng);
      for (int i = 0; i < n; ++i) view.origin_of.emplace_back(i);
      for (int d = 0; d < dummies; ++d) view.origin_of.emplace_back(std::nullopt);
      local.dummies_appended = dummies;
      break;
    }
    case AugKind::NodeReplacement: {
      // Clamped to keep at least one survivor: dummies aggregate over the
      // surviving nodes, which must be nonempty.
      const int removed_count = std::min(count_from_fraction(spec.fraction, n), n - 1);
      std::vector<int> removed = rng.sample_without_replacement(n, removed_count);
      std::sort(removed.begin(), removed.end());
      std::vector<int> survivors;
      survivors.reserve(n - removed_count);
      for (int v = 0; v < n; ++v)
        if (!std::binary_search(removed.begin(), removed.end(), v)) survivors.push_back(v);
      view.graph = induced_subgraph(g, survivors);
      insert_dummies(view.graph, removed_count, spec, rng);
      for (int v : survivors) view.origin_of.emplace_back(v);
      for (int d = 0; d < removed_count; ++d) view.origin_of.emplace_back(std::nullopt);
      local.removed_originals = std::move(removed);
      local.dummies_appended = removed_count;
      break;
    }
    case AugKind::EdgeRemoval: {
      view.graph = g;
      for (const auto& [i, j] : edges_of(g.adjacency)) {
        if (rng.uniform01() < spec.fraction) {
          view.graph.adjacency(i, j) = 0.0;
          view.graph.adjacency(j, i) = 0.0;
        }
      }
      for (int i = 0; i < n; ++i) view.origin_of.emplace_back(i);
      break;
    }
    case AugKind::FeatureScaleUnivariate: {
      view.graph = g;
      for (int v = 0; v < n; ++v)
        view.graph.features.row(v) *= rng.uniform(spec.scale_lo, spec.scale_hi);
      for (int i = 0; i < n; ++i) view.origin_of.emplace_back(i);
      break;
    }
    case AugKind::FeatureScaleMultivariate: {
      view.graph = g;
      for (int v = 0; v < n; ++v)
        for (int d = 0; d < g.feature_dim(); ++d)
          view.graph.features(v, d) *= rng.uniform(spec.scale_lo, spec.scale_hi);
      for (int i = 0; i < n; ++i) view.origin_of.emplace_back(i);
      break;
    }
    case AugKind::NodeDropping: {
      std::vector<char> keep(n, 0);
      int kept = 0;
      for (int v = 0; v < n; ++v) {
        keep[v] = rng.uniform01() >= spec.fraction;
        kept += keep[v];
      }
      if (kept == 0) keep[rng.below(n)] = 1;  // forced retention
      std::vector<int> survivors;
      for (int v = 0; v < n; ++v) {
        if (keep[v])
          survivors.push_back(v);
        else
          local.removed_originals.push_back(v);
      }
      view.graph = induced_subgraph(g, survivors);
      for (int v : survivors) view.origin_of.emplace_back(v);
      break;
    }
    case AugKind::FeatureMasking: {
      view.graph = g;
      for (int d = 0; d < g.feature_dim(); ++d)
        if (rng.uniform01() < spec.fraction) view.graph.features.col(d).setZero();
      for (int i = 0; i < n; ++i) view.origin_of.emplace_back(i);
      break;
    }
    case AugKind::Mixup: {
      view.graph = g;
      const Eigen::RowVectorXd mean = g.features.colwise().mean();
      view.graph.features = (1.0 - spec.mix) * g.features;
      view.graph.features.rowwise() += spec.mix * mean;
      for (int i = 0; i < n; ++i) view.origin_of.emplace_back(i);
      break;
    }
  }

  if (view.graph.num_nodes() == 0) throw EmptyViewError("augmentation produced an empty view");
  if (trace) *trace = std::move(local);
  return view;
}

Eigen::MatrixXd self_ground_truth(const AugmentedView& a, const AugmentedView& b) {
  const int na = a.graph.num_nodes();
  const int nb = b.graph.num_nodes();
  std::vector<int> a_row_of;  // original index -> view-A row
  for (int i = 0; i < na; ++i) {
    if (!a.origin_of[i]) continue;
    const int orig = *a.origin_of[i];
    if (orig >= static_cast<int>(a_row_of.size())) a_row_of.resize(orig + 1, -1);
    a_row_of[orig] = i;
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(na, nb);
  for (int j = 0; j < nb; ++j) {
    if (!b.origin_of[j]) continue;
    const int orig = *b.origin_of[j];
    if (orig < static_cast<int>(a_row_of.size()) && a_row_of[orig] >= 0)
      g(a_row_of[orig], j) = 1.0;
  }
  return g;
}

std::vector<std::pair<int, int>> correspondence_pairs(const AugmentedView& a,
                                                      const AugmentedView& b) {
  const Eigen::MatrixXd g = self_ground_truth(a, b);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      if (g(i, j) == 1.0) pairs.emplace_back(i, j);
  return pairs;
}

}  // namespace gm
