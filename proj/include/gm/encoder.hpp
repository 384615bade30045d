#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "gm/autodiff.hpp"
#include "gm/graph.hpp"

namespace gm {

struct EncoderDims {
  int in_dim = 16;    // node feature dimension F
  int hidden = 64;    // node embedding dimension
  int proj = 32;      // projection-head output dimension

  void validate() const;  // throws ConfigError
};

// Two message-passing layers (self + mean-of-neighbours linear maps, relu,
// additive skip) followed by a two-layer projection head. The layer-1 skip
// crosses a dimension change, so it carries its own linear projection; the
// layer-2 skip is the identity.
struct EncoderParams {
  EncoderDims dims;
  Eigen::MatrixXd w_self1, w_neigh1, w_skip1;  // in_dim x hidden
  Eigen::MatrixXd b1;                          // 1 x hidden
  Eigen::MatrixXd w_self2, w_neigh2;           // hidden x hidden
  Eigen::MatrixXd b2;                          // 1 x hidden
  Eigen::MatrixXd w_p1;                        // hidden x hidden
  Eigen::MatrixXd bp1;                         // 1 x hidden
  Eigen::MatrixXd w_p2;                        // hidden x proj
  Eigen::MatrixXd bp2;                         // 1 x proj

  // Visits every parameter in a fixed order (name, matrix).
  void for_each(const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn);
  void for_each(const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn) const;
  void check_shapes() const;  // throws ShapeError
};

// Xavier-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases;
// deterministic per seed.
EncoderParams init_encoder_params(std::uint64_t seed, const EncoderDims& dims);

// Tape-bound parameter handles for one forward/backward pass.
struct EncoderVars {
  ad::Var w_self1, w_neigh1, w_skip1, b1;
  ad::Var w_self2, w_neigh2, b2;
  ad::Var w_p1, bp1, w_p2, bp2;
};

// Binds every parameter as a differentiable leaf (same order as for_each).
EncoderVars bind_encoder(ad::Tape& tape, const EncoderParams& p);

// Node embeddings H (N x hidden) and mean-readout graph embedding (1 x
// hidden) for one graph. Isolated nodes aggregate a zero neighbour mean.
std::pair<ad::Var, ad::Var> encode_nodes(ad::Tape& tape, const EncoderVars& vars, const Graph& g);

// Projection head: relu(H w_p1 + bp1) w_p2 + bp2, N x proj.
ad::Var project_nodes(ad::Tape& tape, const EncoderVars& vars, ad::Var h);

// Convenience plain-value forward passes (fresh local tape, no gradients).
std::pair<Eigen::MatrixXd, Eigen::RowVectorXd> encode(const Graph& g, const EncoderParams& p);
Eigen::MatrixXd project(const Eigen::MatrixXd& h, const EncoderParams& p);

// The row-normalized adjacency used for mean aggregation (zero rows for
// isolated nodes).
Eigen::MatrixXd mean_aggregation_matrix(const Eigen::MatrixXd& adjacency);

}  // namespace gm
