#include "gm/autodiff.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace gm::ad {

namespace {

constexpr double kLogGuard = 1e-30;
constexpr double kNormGuard = 1e-12;
constexpr double kSumGuard = 1e-300;

std::string shape_str(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_tape(Var a, Var b, const char* op) {
  if (a.tape == nullptr || b.tape == nullptr || a.tape != b.tape)
    throw ShapeError(std::string(op) + ": operands live on different tapes");
}

void require_valid(Var a, const char* op) {
  if (a.tape == nullptr || a.idx < 0)
    throw ShapeError(std::string(op) + ": operand is not bound to a tape");
}

}  // namespace

Var emit(Tape& t, Eigen::MatrixXd value, const char* op_name,
         std::function<void(Tape&, int)> backprop) {
  if (!value.allFinite())
    throw NonFiniteError(std::string(op_name) + ": forward output contains NaN or Inf");
  t.nodes_.push_back(Tape::Node{std::move(value), Eigen::MatrixXd(), std::move(backprop)});
  return Var{&t, static_cast<int>(t.nodes_.size()) - 1};
}

Var Tape::leaf(const Eigen::MatrixXd& value) { return emit(*this, value, "leaf", nullptr); }

Var Tape::constant(const Eigen::MatrixXd& value) {
  return emit(*this, value, "constant", nullptr);
}

Var Tape::constant_scalar(double value) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = value;
  return constant(m);
}

const Eigen::MatrixXd& Tape::value(Var v) const {
  if (v.tape != this || v.idx < 0 || v.idx >= size())
    throw ShapeError("value: variable is not on this tape");
  return nodes_[v.idx].value;
}

const Eigen::MatrixXd& Tape::grad(Var v) const {
  if (v.tape != this || v.idx < 0 || v.idx >= size())
    throw ShapeError("grad: variable is not on this tape");
  if (nodes_[v.idx].grad.size() == 0)
    throw NumericError("grad: backward() has not been run on this tape");
  return nodes_[v.idx].grad;
}

void Tape::backward(Var root) {
  if (root.tape != this || root.idx < 0 || root.idx >= size())
    throw ShapeError("backward: root is not on this tape");
  const Eigen::MatrixXd& rv = nodes_[root.idx].value;
  if (rv.rows() != 1 || rv.cols() != 1)
    throw NotScalarError("backward: root must be 1x1, got " + shape_str(rv));
  for (Node& n : nodes_) n.grad = Eigen::MatrixXd::Zero(n.value.rows(), n.value.cols());
  nodes_[root.idx].grad(0, 0) = 1.0;
  for (int i = root.idx; i >= 0; --i)
    if (nodes_[i].backprop) nodes_[i].backprop(*this, i);
}

// --- primitives ---------------------------------------------------------------

Var matmul(Var a, Var b) {
  require_same_tape(a, b, "matmul");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  const Eigen::MatrixXd& bv = t.value(b);
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: " + shape_str(av) + " x " + shape_str(bv));
  return emit(t, av * bv, "matmul", [ai = a.idx, bi = b.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai) += g * tp.value_ref(bi).transpose();
    tp.grad_ref(bi) += tp.value_ref(ai).transpose() * g;
  });
}

Var transpose(Var a) {
  require_valid(a, "transpose");
  Tape& t = *a.tape;
  return emit(t, t.value(a).transpose(), "transpose", [ai = a.idx](Tape& tp, int self) {
    tp.grad_ref(ai) += tp.grad_ref(self).transpose();
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b, "add");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  const Eigen::MatrixXd& bv = t.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw ShapeError("add: " + shape_str(av) + " vs " + shape_str(bv));
  return emit(t, av + bv, "add", [ai = a.idx, bi = b.idx](Tape& tp, int self) {
    tp.grad_ref(ai) += tp.grad_ref(self);
    tp.grad_ref(bi) += tp.grad_ref(self);
  });
}

Var add_rowvec(Var a, Var v) {
  require_same_tape(a, v, "add_rowvec");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  const Eigen::MatrixXd& vv = t.value(v);
  if (vv.rows() != 1 || vv.cols() != av.cols())
    throw ShapeError("add_rowvec: " + shape_str(av) + " vs " + shape_str(vv));
  Eigen::MatrixXd out = av;
  out.rowwise() += vv.row(0);
  return emit(t, std::move(out), "add_rowvec", [ai = a.idx, vi = v.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai) += g;
    tp.grad_ref(vi) += g.colwise().sum();
  });
}

Var subtract(Var a, Var b) {
  require_same_tape(a, b, "subtract");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  const Eigen::MatrixXd& bv = t.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw ShapeError("subtract: " + shape_str(av) + " vs " + shape_str(bv));
  return emit(t, av - bv, "subtract", [ai = a.idx, bi = b.idx](Tape& tp, int self) {
    tp.grad_ref(ai) += tp.grad_ref(self);
    tp.grad_ref(bi) -= tp.grad_ref(self);
  });
}

Var cmul(Var a, Var b) {
  require_same_tape(a, b, "cmul");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  const Eigen::MatrixXd& bv = t.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw ShapeError("cmul: " + shape_str(av) + " vs " + shape_str(bv));
  return emit(t, av.cwiseProduct(bv), "cmul", [ai = a.idx, bi = b.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai) += g.cwiseProduct(tp.value_ref(bi));
    tp.grad_ref(bi) += g.cwiseProduct(tp.value_ref(ai));
  });
}

Var scalar_mul(Var a, double s) {
  require_valid(a, "scalar_mul");
  Tape& t = *a.tape;
  return emit(t, t.value(a) * s, "scalar_mul", [ai = a.idx, s](Tape& tp, int self) {
    tp.grad_ref(ai) += s * tp.grad_ref(self);
  });
}

Var scalar_add(Var a, double s) {
  require_valid(a, "scalar_add");
  Tape& t = *a.tape;
  return emit(t, (t.value(a).array() + s).matrix(), "scalar_add", [ai = a.idx](Tape& tp, int self) {
    tp.grad_ref(ai) += tp.grad_ref(self);
  });
}

Var exp(Var a) {
  require_valid(a, "exp");
  Tape& t = *a.tape;
  return emit(t, t.value(a).array().exp().matrix(), "exp", [ai = a.idx](Tape& tp, int self) {
    tp.grad_ref(ai) += tp.grad_ref(self).cwiseProduct(tp.value_ref(self));
  });
}

Var log(Var a) {
  require_valid(a, "log");
  Tape& t = *a.tape;
  Eigen::MatrixXd out = t.value(a).cwiseMax(kLogGuard).array().log().matrix();
  return emit(t, std::move(out), "log", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& x = tp.value_ref(ai);
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai).array() +=
        g.array() * (x.array() >= kLogGuard).cast<double>() / x.cwiseMax(kLogGuard).array();
  });
}

Var relu(Var a) {
  require_valid(a, "relu");
  Tape& t = *a.tape;
  return emit(t, t.value(a).cwiseMax(0.0), "relu", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& x = tp.value_ref(ai);
    tp.grad_ref(ai).array() +=
        tp.grad_ref(self).array() * (x.array() > 0.0).cast<double>();
  });
}

Var abs(Var a) {
  require_valid(a, "abs");
  Tape& t = *a.tape;
  return emit(t, t.value(a).cwiseAbs(), "abs", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& x = tp.value_ref(ai);
    tp.grad_ref(ai).array() += tp.grad_ref(self).array() * x.array().sign();
  });
}

Var row_l2_normalize(Var a) {
  require_valid(a, "row_l2_normalize");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& x = t.value(a);
  Eigen::VectorXd norms = x.rowwise().norm().cwiseMax(kNormGuard);
  Eigen::MatrixXd out = norms.cwiseInverse().asDiagonal() * x;
  return emit(t, std::move(out), "row_l2_normalize", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& x = tp.value_ref(ai);
    const Eigen::MatrixXd& y = tp.value_ref(self);
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    Eigen::MatrixXd& gx = tp.grad_ref(ai);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double raw = x.row(i).norm();
      if (raw >= kNormGuard) {
        const double dot = g.row(i).dot(y.row(i));
        gx.row(i) += (g.row(i) - dot * y.row(i)) / raw;
      } else {
        gx.row(i) += g.row(i) / kNormGuard;
      }
    }
  });
}

Var row_sum(Var a) {
  require_valid(a, "row_sum");
  Tape& t = *a.tape;
  return emit(t, t.value(a).rowwise().sum(), "row_sum", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);  // N x 1
    tp.grad_ref(ai).colwise() += Eigen::VectorXd(g.col(0));
  });
}

Var col_sum(Var a) {
  require_valid(a, "col_sum");
  Tape& t = *a.tape;
  return emit(t, t.value(a).colwise().sum(), "col_sum", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);  // 1 x C
    tp.grad_ref(ai).rowwise() += Eigen::RowVectorXd(g.row(0));
  });
}

Var row_mean(Var a) {
  require_valid(a, "row_mean");
  Tape& t = *a.tape;
  const double c = static_cast<double>(t.value(a).cols());
  return emit(t, t.value(a).rowwise().mean(), "row_mean", [ai = a.idx, c](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai).colwise() += Eigen::VectorXd(g.col(0) / c);
  });
}

Var col_mean(Var a) {
  require_valid(a, "col_mean");
  Tape& t = *a.tape;
  const double r = static_cast<double>(t.value(a).rows());
  return emit(t, t.value(a).colwise().mean(), "col_mean", [ai = a.idx, r](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai).rowwise() += Eigen::RowVectorXd(g.row(0) / r);
  });
}

Var row_max(Var a) {
  require_valid(a, "row_max");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& x = t.value(a);
  if (x.cols() < 1) throw ShapeError("row_max: matrix has no columns");
  Eigen::MatrixXd out(x.rows(), 1);
  std::vector<int> argmax(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index j;
    out(i, 0) = x.row(i).maxCoeff(&j);
    argmax[i] = static_cast<int>(j);
  }
  return emit(t, std::move(out), "row_max",
              [ai = a.idx, argmax = std::move(argmax)](Tape& tp, int self) {
                const Eigen::MatrixXd& g = tp.grad_ref(self);
                Eigen::MatrixXd& gx = tp.grad_ref(ai);
                for (Eigen::Index i = 0; i < g.rows(); ++i) gx(i, argmax[i]) += g(i, 0);
              });
}

Var sum(Var a) {
  require_valid(a, "sum");
  Tape& t = *a.tape;
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = t.value(a).sum();
  return emit(t, std::move(out), "sum", [ai = a.idx](Tape& tp, int self) {
    tp.grad_ref(ai).array() += tp.grad_ref(self)(0, 0);
  });
}

Var mean(Var a) {
  require_valid(a, "mean");
  Tape& t = *a.tape;
  const double n = static_cast<double>(t.value(a).size());
  if (n == 0) throw ShapeError("mean: empty matrix");
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = t.value(a).mean();
  return emit(t, std::move(out), "mean", [ai = a.idx, n](Tape& tp, int self) {
    tp.grad_ref(ai).array() += tp.grad_ref(self)(0, 0) / n;
  });
}

Var concat_cols(Var a, Var b) {
  require_same_tape(a, b, "concat_cols");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  const Eigen::MatrixXd& bv = t.value(b);
  if (av.rows() != bv.rows())
    throw ShapeError("concat_cols: " + shape_str(av) + " vs " + shape_str(bv));
  Eigen::MatrixXd out(av.rows(), av.cols() + bv.cols());
  out << av, bv;
  const auto ca = av.cols();
  return emit(t, std::move(out), "concat_cols", [ai = a.idx, bi = b.idx, ca](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai) += g.leftCols(ca);
    tp.grad_ref(bi) += g.rightCols(g.cols() - ca);
  });
}

Var concat_rows(Var a, Var b) {
  require_same_tape(a, b, "concat_rows");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  const Eigen::MatrixXd& bv = t.value(b);
  if (av.cols() != bv.cols())
    throw ShapeError("concat_rows: " + shape_str(av) + " vs " + shape_str(bv));
  Eigen::MatrixXd out(av.rows() + bv.rows(), av.cols());
  out << av, bv;
  const auto ra = av.rows();
  return emit(t, std::move(out), "concat_rows", [ai = a.idx, bi = b.idx, ra](Tape& tp, int self) {
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    tp.grad_ref(ai) += g.topRows(ra);
    tp.grad_ref(bi) += g.bottomRows(g.rows() - ra);
  });
}

Var slice_rows(Var a, int start, int count) {
  require_valid(a, "slice_rows");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  if (start < 0 || count < 0 || start + count > av.rows())
    throw ShapeError("slice_rows: range [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") outside " + shape_str(av));
  return emit(t, av.middleRows(start, count), "slice_rows",
              [ai = a.idx, start, count](Tape& tp, int self) {
                tp.grad_ref(ai).middleRows(start, count) += tp.grad_ref(self);
              });
}

Var slice_cols(Var a, int start, int count) {
  require_valid(a, "slice_cols");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& av = t.value(a);
  if (start < 0 || count < 0 || start + count > av.cols())
    throw ShapeError("slice_cols: range [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") outside " + shape_str(av));
  return emit(t, av.middleCols(start, count), "slice_cols",
              [ai = a.idx, start, count](Tape& tp, int self) {
                tp.grad_ref(ai).middleCols(start, count) += tp.grad_ref(self);
              });
}

Var row_sum_normalize(Var a) {
  require_valid(a, "row_sum_normalize");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& x = t.value(a);
  Eigen::VectorXd sums = x.rowwise().sum().cwiseMax(kSumGuard);
  Eigen::MatrixXd out = sums.cwiseInverse().asDiagonal() * x;
  return emit(t, std::move(out), "row_sum_normalize", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& x = tp.value_ref(ai);
    const Eigen::MatrixXd& y = tp.value_ref(self);
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    Eigen::MatrixXd& gx = tp.grad_ref(ai);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double raw = x.row(i).sum();
      if (raw >= kSumGuard) {
        const double dot = g.row(i).dot(y.row(i));
        gx.row(i) += (g.row(i).array() - dot).matrix() / raw;
      } else {
        gx.row(i) += g.row(i) / kSumGuard;
      }
    }
  });
}

Var col_sum_normalize(Var a) {
  require_valid(a, "col_sum_normalize");
  Tape& t = *a.tape;
  const Eigen::MatrixXd& x = t.value(a);
  Eigen::RowVectorXd sums = x.colwise().sum().cwiseMax(kSumGuard);
  Eigen::MatrixXd out = x * sums.cwiseInverse().asDiagonal();
  return emit(t, std::move(out), "col_sum_normalize", [ai = a.idx](Tape& tp, int self) {
    const Eigen::MatrixXd& x = tp.value_ref(ai);
    const Eigen::MatrixXd& y = tp.value_ref(self);
    const Eigen::MatrixXd& g = tp.grad_ref(self);
    Eigen::MatrixXd& gx = tp.grad_ref(ai);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double raw = x.col(j).sum();
      if (raw >= kSumGuard) {
        const double dot = g.col(j).dot(y.col(j));
        gx.col(j) += (g.col(j).array() - dot).matrix() / raw;
      } else {
        gx.col(j) += g.col(j) / kSumGuard;
      }
    }
  });
}

}  // namespace gm::ad
