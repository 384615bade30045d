#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "gm/encoder.hpp"
#include "gm/json_util.hpp"
#include "gm/losses.hpp"
#include "gm/matcher.hpp"
#include "gm/pool.hpp"

namespace gm {

// Everything needed to match two graphs: the node encoder, the bilinear
// affinity form over hidden embeddings, and the Sinkhorn settings. The loss
// configuration rides along so checkpoints are self-describing.
struct Model {
  EncoderDims dims;
  EncoderParams enc;
  Eigen::MatrixXd w_aff;  // hidden x hidden
  SinkhornConfig sinkhorn;
  LossConfig loss;
  std::uint64_t init_seed = 0;

  void check_shapes() const;  // throws ShapeError

  // Visits every learnable parameter in a fixed order (encoder parameters
  // first, then w_aff); the order defines the optimizer state layout.
  void for_each_param(const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn);
  void for_each_param(
      const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn) const;
};

// Fresh model with Xavier-uniform weights and zero biases.
Model make_model(std::uint64_t seed, const EncoderDims& dims,
                 const SinkhornConfig& sinkhorn, const LossConfig& loss);

// Plain bilinear affinity matrix between two graphs' hidden embeddings.
Eigen::MatrixXd model_affinity(const Model& model, const Graph& a, const Graph& b);

// Frozen-model inference on one pair: optional intersection restriction,
// encode, affinity, Sinkhorn, Hungarian, and F1 against the ground truth.
MatchResult predict(const Model& model, const GraphPair& pair, EvalSetting setting);

// Model checkpoint with an optional sampling-pool state.
struct Checkpoint {
  Model model;
  std::optional<Pool> pool;
};

Json checkpoint_to_json(const Model& model, const Pool* pool);
Checkpoint checkpoint_from_json(const Json& j);

void save_checkpoint(const std::string& path, const Model& model, const Pool* pool);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gm
