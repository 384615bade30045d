#include "gm/encoder.hpp"

#include <cmath>

#include "gm/errors.hpp"
#include "gm/rng.hpp"

namespace gm {

void EncoderDims::validate() const {
  if (in_dim < 1 || hidden < 1 || proj < 1)
    throw ConfigError("encoder dims must all be >= 1");
}

void EncoderParams::for_each(
    const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn) {
  fn("w_self1", w_self1);
  fn("w_neigh1", w_neigh1);
  fn("w_skip1", w_skip1);
  fn("b1", b1);
  fn("w_self2", w_self2);
  fn("w_neigh2", w_neigh2);
  fn("b2", b2);
  fn("w_p1", w_p1);
  fn("bp1", bp1);
  fn("w_p2", w_p2);
  fn("bp2", bp2);
}

void EncoderParams::for_each(
    const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn) const {
  const_cast<EncoderParams*>(this)->for_each(
      [&](const std::string& name, Eigen::MatrixXd& m) { fn(name, m); });
}

void EncoderParams::check_shapes() const {
  dims.validate();
  auto expect = [](const Eigen::MatrixXd& m, int r, int c, const char* name) {
    if (m.rows() != r || m.cols() != c)
      throw ShapeError(std::string("encoder parameter ") + name + " must be " +
                       std::to_string(r) + "x" + std::to_string(c));
    if (!m.allFinite())
      throw NonFiniteError(std::string("encoder parameter ") + name + " is non-finite");
  };
  expect(w_self1, dims.in_dim, dims.hidden, "w_self1");
  expect(w_neigh1, dims.in_dim, dims.hidden, "w_neigh1");
  expect(w_skip1, dims.in_dim, dims.hidden, "w_skip1");
  expect(b1, 1, dims.hidden, "b1");
  expect(w_self2, dims.hidden, dims.hidden, "w_self2");
  expect(w_neigh2, dims.hidden, dims.hidden, "w_neigh2");
  expect(b2, 1, dims.hidden, "b2");
  expect(w_p1, dims.hidden, dims.hidden, "w_p1");
  expect(bp1, 1, dims.hidden, "bp1");
  expect(w_p2, dims.hidden, dims.proj, "w_p2");
  expect(bp2, 1, dims.proj, "bp2");
}

namespace {

Eigen::MatrixXd xavier(Rng& rng, int rows, int cols) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

}  // namespace

EncoderParams init_encoder_params(std::uint64_t seed, const EncoderDims& dims) {
  dims.validate();
  Rng rng(seed);
  EncoderParams p;
  p.dims = dims;
  p.w_self1 = xavier(rng, dims.in_dim, dims.hidden);
  p.w_neigh1 = xavier(rng, dims.in_dim, dims.hidden);
  p.w_skip1 = xavier(rng, dims.in_dim, dims.hidden);
  p.b1 = Eigen::MatrixXd::Zero(1, dims.hidden);
  p.w_self2 = xavier(rng, dims.hidden, dims.hidden);
  p.w_neigh2 = xavier(rng, dims.hidden, dims.hidden);
  p.b2 = Eigen::MatrixXd::Zero(1, dims.hidden);
  p.w_p1 = xavier(rng, dims.hidden, dims.hidden);
  p.bp1 = Eigen::MatrixXd::Zero(1, dims.hidden);
  p.w_p2 = xavier(rng, dims.hidden, dims.proj);
  p.bp2 = Eigen::MatrixXd::Zero(1, dims.proj);
  return p;
}

EncoderVars bind_encoder(ad::Tape& tape, const EncoderParams& p) {
  p.check_shapes();
  EncoderVars v;
  v.w_self1 = tape.leaf(p.w_self1);
  v.w_neigh1 = tape.leaf(p.w_neigh1);
  v.w_skip1 = tape.leaf(p.w_skip1);
  v.b1 = tape.leaf(p.b1);
  v.w_self2 = tape.leaf(p.w_self2);
  v.w_neigh2 = tape.leaf(p.w_neigh2);
  v.b2 = tape.leaf(p.b2);
  v.w_p1 = tape.leaf(p.w_p1);
  v.bp1 = tape.leaf(p.bp1);
  v.w_p2 = tape.leaf(p.w_p2);
  v.bp2 = tape.leaf(p.bp2);
  return v;
}

Eigen::MatrixXd mean_aggregation_matrix(const Eigen::MatrixXd& adjacency) {
  const Eigen::Index n = adjacency.rows();
  Eigen::MatrixXd norm = adjacency;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double deg = adjacency.row(i).sum();
    if (deg > 0.0) norm.row(i) /= deg;
  }
  return norm;
}

std::pair<ad::Var, ad::Var> encode_nodes(ad::Tape& tape, const EncoderVars& vars,
                                         const Graph& g) {
  g.validate();
  const Eigen::MatrixXd& w1 = tape.value(vars.w_self1);
  if (g.feature_dim() != w1.rows())
    throw ShapeError("encode: graph feature dim " + std::to_string(g.feature_dim()) +
                     " does not match encoder input dim " + std::to_string(w1.rows()));

  const ad::Var x = tape.constant(g.features);
  const ad::Var aggr = tape.constant(mean_aggregation_matrix(g.adjacency));

  // Layer 1: relu(X W_self + (A_mean X) W_neigh + b) + X W_skip
  ad::Var pre1 = ad::add(ad::matmul(x, vars.w_self1),
                         ad::matmul(ad::matmul(aggr, x), vars.w_neigh1));
  ad::Var h1 = ad::add(ad::relu(ad::add_rowvec(pre1, vars.b1)),
                       ad::matmul(x, vars.w_skip1));

  // Layer 2: relu(H W_self + (A_mean H) W_neigh + b) + H (identity skip)
  ad::Var pre2 = ad::add(ad::matmul(h1, vars.w_self2),
                         ad::matmul(ad::matmul(aggr, h1), vars.w_neigh2));
  ad::Var h2 = ad::add(ad::relu(ad::add_rowvec(pre2, vars.b2)), h1);

  ad::Var readout = ad::col_mean(h2);
  return {h2, readout};
}

ad::Var project_nodes(ad::Tape& tape, const EncoderVars& vars, ad::Var h) {
  (void)tape;
  ad::Var hidden = ad::relu(ad::add_rowvec(ad::matmul(h, vars.w_p1), vars.bp1));
  return ad::add_rowvec(ad::matmul(hidden, vars.w_p2), vars.bp2);
}

std::pair<Eigen::MatrixXd, Eigen::RowVectorXd> encode(const Graph& g, const EncoderParams& p) {
  ad::Tape tape;
  EncoderVars vars = bind_encoder(tape, p);
  auto [h, readout] = encode_nodes(tape, vars, g);
  return {tape.value(h), tape.value(readout).row(0)};
}

Eigen::MatrixXd project(const Eigen::MatrixXd& h, const EncoderParams& p) {
  ad::Tape tape;
  EncoderVars vars = bind_encoder(tape, p);
  ad::Var hv = tape.constant(h);
  return tape.value(project_nodes(tape, vars, hv));
}

}  // namespace gm
