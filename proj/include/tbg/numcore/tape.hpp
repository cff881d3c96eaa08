//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_TAPE_HPP
#define TBG_NUMCORE_TAPE_HPP

#include <functional>
#include <string>
#include <vector>

#include "tbg/numcore/matrix.hpp"
#include "tbg/numcore/params.hpp"

namespace tbg::numcore {

// Reverse-mode automatic differentiation over dense matrix operations.
//
// Recording is eager: every builder call computes the result immediately and
// appends one node, so the node list is topologically ordered by
// construction. replay() re-runs the recorded program and reproduces all
// values bit-identically for identical leaf/constant contents. backward()
// accumulates adjoints for every node; parameter gradients are read off the
// leaf adjoints.
class Tape {
 public:
  using NodeId = int;

  enum class Op {
    kConst,
    kLeaf,
    kMatMul,          // a(RxK) * b(KxC)
    kAdd,             // a + b, same shape
    kSub,             // a - b, same shape
    kAddRowVec,       // a(RxC) + broadcast b(1xC)
    kSubRowVec,       // a(RxC) - broadcast b(1xC)
    kMul,             // elementwise a * b
    kMulCol,          // a(RxC) * broadcast col b(Rx1)
    kSiLU,            // x * sigmoid(x)
    kSigmoid,
    kConcatCols,      // [a | b]
    kGatherRows,      // rows of a selected by index list
    kScatterAddRows,  // out[idx[p], :] += a[p, :]
    kRowSqNorm,       // (RxC) -> (Rx1), sum of squares per row
    kSqrt,
    kAddScalar,       // a + s
    kScale,           // s * a
    kRecip,           // 1 / a
    kSum,             // total sum -> 1x1
    kSqNorm,          // total sum of squares -> 1x1
    kColMean,         // (RxC) -> (1xC)
  };

  struct Node {
    Op op;
    NodeId a = -1;
    NodeId b = -1;
    double scalar = 0.0;
    std::vector<int> index;  // kGatherRows / kScatterAddRows
    int aux_rows = 0;        // kScatterAddRows output row count
    Matrix val;
    Matrix adj;
  };

  // When true (default), every recorded value is checked for NaN/Inf and a
  // numeric_error carrying the node id is thrown on violation.
  explicit Tape(bool check_finite = true) : check_finite_(check_finite) {}

  NodeId constant(Matrix value);
  NodeId leaf(Matrix value);

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId add_rowvec(NodeId a, NodeId row);
  NodeId sub_rowvec(NodeId a, NodeId row);
  NodeId mul(NodeId a, NodeId b);
  NodeId mul_col(NodeId a, NodeId col);
  NodeId silu(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId concat_cols(NodeId a, NodeId b);
  NodeId gather_rows(NodeId a, std::vector<int> idx);
  NodeId scatter_add_rows(NodeId a, std::vector<int> idx, int out_rows);
  NodeId row_sqnorm(NodeId a);
  NodeId sqrt(NodeId a);
  NodeId add_scalar(NodeId a, double s);
  NodeId scale(NodeId a, double s);
  NodeId recip(NodeId a);
  NodeId sum(NodeId a);
  NodeId sqnorm(NodeId a);
  NodeId col_mean(NodeId a);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Matrix& value(NodeId id) const { return at(id).val; }
  const Matrix& adjoint(NodeId id) const { return at(id).adj; }
  Matrix& mutable_value(NodeId id) { return at(id).val; }
  double scalar_value(NodeId id) const;

  // Recompute all non-leaf, non-constant values in recorded order.
  void replay();

  // Reverse pass from a scalar (1x1) root. Zeroes and then fills adjoints.
  void backward(NodeId root);

 private:
  Node& at(NodeId id);
  const Node& at(NodeId id) const;
  NodeId push(Node node);
  void compute(Node& n) const;
  void check(const Node& n, NodeId id) const;

  std::vector<Node> nodes_;
  bool check_finite_;
};

// Records `f` against fresh leaf nodes holding the segments of `at`, checks
// the result is scalar, runs the reverse pass, and returns the flat gradient
// with the same layout as `at`. If `value_out` is non-null it receives f's
// value. Deterministic: identical inputs give bit-identical gradients.
using RecordedFn = std::function<Tape::NodeId(Tape&, const std::vector<Tape::NodeId>&)>;
std::vector<double> grad(const RecordedFn& f, const ParamVector& at, double* value_out = nullptr);

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_TAPE_HPP
