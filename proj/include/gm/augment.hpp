#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gm/graph.hpp"
#include "gm/json_util.hpp"
#include "gm/rng.hpp"

namespace gm {

// The augmentation vocabulary. Structure-editing kinds (NodeInsertion,
// NodeReplacement, NodeDropping) change the node set; the rest preserve it.
enum class AugKind {
  Identity,
  NodeInsertion,
  NodeReplacement,
  EdgeRemoval,
  FeatureScaleUnivariate,
  FeatureScaleMultivariate,
  NodeDropping,
  FeatureMasking,
  Mixup,
};

enum class Aggregator { Mean, Max };

constexpr int kNumAugKinds = 9;
const char* aug_kind_name(AugKind k);
AugKind aug_kind_from_name(const std::string& name);  // throws InvalidSpecError

// One parameterized augmentation. Which fields are meaningful depends on the
// kind:
//   NodeInsertion / NodeReplacement: fraction, subset_size, aggregator,
//     edges_per_dummy
//   EdgeRemoval / NodeDropping / FeatureMasking: fraction
//   FeatureScale*: scale_lo, scale_hi
//   Mixup: mix
//   Identity: none
struct AugSpec {
  AugKind kind = AugKind::Identity;
  double fraction = 0.0;   // in [0, 1]
  int subset_size = 0;     // >= 2 for the kinds that use it
  Aggregator aggregator = Aggregator::Mean;
  int edges_per_dummy = 0;  // >= 1 for the kinds that use it
  double scale_lo = 0.0;    // in [0.2, 0.8]
  double scale_hi = 0.0;    // in [1.2, 1.8]
  double mix = 0.0;         // in [0, 1]

  void validate() const;  // throws InvalidSpecError
};

Json aug_spec_to_json(const AugSpec& s);
AugSpec aug_spec_from_json(const Json& j);  // throws DataError / InvalidSpecError

// Record of the structural edits an application performed, for tests that
// reconstruct the origin map independently.
struct AugTrace {
  std::vector<int> removed_originals;  // original indices deleted (sorted)
  int dummies_appended = 0;            // synthetic nodes appended at the end
};

// An augmented graph plus the partial injective map from each view node back
// to the original node it descends from (nullopt for synthetic dummies).
struct AugmentedView {
  Graph graph;
  std::vector<std::optional<int>> origin_of;
};

// Applies the augmentation with the given random stream. Draw order is fixed
// per kind, so identical (spec, graph, rng state) triples give identical
// views. Coordinates are kept for view nodes that descend from an original
// with coordinates and dropped entirely when the view contains dummies.
AugmentedView apply(const AugSpec& spec, const Graph& g, Rng& rng, AugTrace* trace = nullptr);

// Self-supervised ground truth between two views of the SAME original graph:
// G(i, j) = 1 iff both origins are defined and equal. Always a valid partial
// permutation because origin maps are injective.
Eigen::MatrixXd self_ground_truth(const AugmentedView& a, const AugmentedView& b);

// The same correspondence as an (i, j) pair list (sorted by i).
std::vector<std::pair<int, int>> correspondence_pairs(const AugmentedView& a,
                                                      const AugmentedView& b);

}  // namespace gm
