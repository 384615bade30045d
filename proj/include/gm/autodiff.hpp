#pragma once

#include <Eigen/Dense>
#include <deque>
#include <functional>

#include "gm/errors.hpp"

namespace gm::ad {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid as long as the tape lives.
struct Var {
  Tape* tape = nullptr;
  int idx = -1;
};

// Reverse-mode tape over dense double matrices. Scalars are 1x1 matrices,
// row vectors 1xC. Every forward output is checked for NaN/Inf
// (NonFiniteError names the offending op). backward() walks the tape in
// reverse emission order, so gradients are bitwise deterministic.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // A differentiable input (parameter or data the loss is differentiated
  // against).
  Var leaf(const Eigen::MatrixXd& value);
  // A non-differentiable input; backward treats it as a constant.
  Var constant(const Eigen::MatrixXd& value);
  Var constant_scalar(double value);

  const Eigen::MatrixXd& value(Var v) const;
  // Gradient of the last backward() root with respect to v (zero matrix for
  // nodes the root does not reach).
  const Eigen::MatrixXd& grad(Var v) const;

  // Seeds the (1x1) root with 1 and accumulates gradients into every node.
  // Throws NotScalarError if root is not 1x1.
  void backward(Var root);

  int size() const { return static_cast<int>(nodes_.size()); }

  // Internal plumbing for the op implementations' backprop closures; not
  // part of the public surface.
  Eigen::MatrixXd& grad_ref(int idx) { return nodes_[idx].grad; }
  const Eigen::MatrixXd& value_ref(int idx) const { return nodes_[idx].value; }

 private:
  friend Var emit(Tape& t, Eigen::MatrixXd value, const char* op_name,
                  std::function<void(Tape&, int)> backprop);

  struct Node {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    std::function<void(Tape&, int)> backprop;  // null for leaves/constants
  };

  std::deque<Node> nodes_;
};

// --- primitive operations ----------------------------------------------------
// All binary ops require both operands on the same tape (ShapeError lists the
// offending op and dimensions otherwise).

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);          // same shape
Var add_rowvec(Var a, Var v);   // (N x C) + (1 x C), broadcast down rows
Var subtract(Var a, Var b);
Var cmul(Var a, Var b);         // elementwise product, same shape
Var scalar_mul(Var a, double s);
Var scalar_add(Var a, double s);
Var exp(Var a);
Var log(Var a);   // guarded: log(max(x, 1e-30))
Var relu(Var a);  // subgradient 0 at 0
Var abs(Var a);   // subgradient 0 at 0
Var row_l2_normalize(Var a);  // rows scaled to unit norm, guard max(norm, 1e-12)
Var row_sum(Var a);   // N x 1
Var col_sum(Var a);   // 1 x C
Var row_mean(Var a);  // N x 1
Var col_mean(Var a);  // 1 x C
Var row_max(Var a);   // N x 1; gradient flows to the first argmax per row
Var sum(Var a);       // 1 x 1
Var mean(Var a);      // 1 x 1
Var concat_cols(Var a, Var b);  // same row count
Var concat_rows(Var a, Var b);  // same column count
Var slice_rows(Var a, int start, int count);
Var slice_cols(Var a, int start, int count);
// Rows (columns) divided by their sum, guard max(sum, 1e-300). Intended for
// positive matrices (Sinkhorn normalization).
Var row_sum_normalize(Var a);
Var col_sum_normalize(Var a);

}  // namespace gm::ad
