//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/numcore/tape.hpp"

#include <cmath>

namespace tbg::numcore {

namespace {

inline double sigmoid_scalar(double x) {
  // Branch keeps exp() argument negative: stable for large |x|.
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tape::Node& Tape::at(NodeId id) {
  if (id < 0 || id >= size()) throw contract_error("Tape: bad node id");
  return nodes_[static_cast<size_t>(id)];
}

const Tape::Node& Tape::at(NodeId id) const {
  if (id < 0 || id >= size()) throw contract_error("Tape: bad node id");
  return nodes_[static_cast<size_t>(id)];
}

Tape::NodeId Tape::push(Node node) {
  compute(node);
  const NodeId id = size();
  check(node, id);
  nodes_.push_back(std::move(node));
  return id;
}

void Tape::check(const Node& n, NodeId id) const {
  if (!check_finite_) return;
  if (!n.val.all_finite())
    throw numeric_error("Tape: non-finite value produced", id);
}

double Tape::scalar_value(NodeId id) const {
  const Matrix& v = at(id).val;
  if (v.rows() != 1 || v.cols() != 1) throw contract_error("Tape: node is not scalar");
  return v(0, 0);
}

Tape::NodeId Tape::constant(Matrix value) {
  Node n;
  n.op = Op::kConst;
  n.val = std::move(value);
  const NodeId id = size();
  check(n, id);
  nodes_.push_back(std::move(n));
  return id;
}

Tape::NodeId Tape::leaf(Matrix value) {
  Node n;
  n.op = Op::kLeaf;
  n.val = std::move(value);
  const NodeId id = size();
  check(n, id);
  nodes_.push_back(std::move(n));
  return id;
}

#define TBG_BINARY(NAME, OPK)                    \
  Tape::NodeId Tape::NAME(NodeId a, NodeId b) {  \
    Node n;                                      \
    n.op = OPK;                                  \
    n.a = a;                                     \
    n.b = b;                                     \
    return push(std::move(n));                   \
  }

TBG_BINARY(matmul, Op::kMatMul)
TBG_BINARY(add, Op::kAdd)
TBG_BINARY(sub, Op::kSub)
TBG_BINARY(add_rowvec, Op::kAddRowVec)
TBG_BINARY(sub_rowvec, Op::kSubRowVec)
TBG_BINARY(mul, Op::kMul)
TBG_BINARY(mul_col, Op::kMulCol)
TBG_BINARY(concat_cols, Op::kConcatCols)
#undef TBG_BINARY

#define TBG_UNARY(NAME, OPK)            \
  Tape::NodeId Tape::NAME(NodeId a) {   \
    Node n;                             \
    n.op = OPK;                         \
    n.a = a;                            \
    return push(std::move(n));          \
  }

TBG_UNARY(silu, Op::kSiLU)
TBG_UNARY(sigmoid, Op::kSigmoid)
TBG_UNARY(row_sqnorm, Op::kRowSqNorm)
TBG_UNARY(sqrt, Op::kSqrt)
TBG_UNARY(recip, Op::kRecip)
TBG_UNARY(sum, Op::kSum)
TBG_UNARY(sqnorm, Op::kSqNorm)
TBG_UNARY(col_mean, Op::kColMean)
#undef TBG_UNARY

Tape::NodeId Tape::gather_rows(NodeId a, std::vector<int> idx) {
  Node n;
  n.op = Op::kGatherRows;
  n.a = a;
  n.index = std::move(idx);
  return push(std::move(n));
}

Tape::NodeId Tape::scatter_add_rows(NodeId a, std::vector<int> idx, int out_rows) {
  Node n;
  n.op = Op::kScatterAddRows;
  n.a = a;
  n.index = std::move(idx);
  n.aux_rows = out_rows;
  return push(std::move(n));
}

Tape::NodeId Tape::add_scalar(NodeId a, double s) {
  Node n;
  n.op = Op::kAddScalar;
  n.a = a;
  n.scalar = s;
  return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId a, double s) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.scalar = s;
  return push(std::move(n));
}

void Tape::compute(Node& n) const {
  const Matrix* A = n.a >= 0 ? &at(n.a).val : nullptr;
  const Matrix* B = n.b >= 0 ? &at(n.b).val : nullptr;
  switch (n.op) {
    case Op::kConst:
    case Op::kLeaf:
      break;
    case Op::kMatMul:
      Matrix::matmul(*A, *B, n.val);
      break;
    case Op::kAdd:
    case Op::kSub: {
      if (!A->same_shape(*B)) throw contract_error("Tape add/sub: shape mismatch");
      n.val = *A;
      const double sgn = n.op == Op::kAdd ? 1.0 : -1.0;
      for (size_t i = 0; i < n.val.size(); ++i) n.val.data()[i] += sgn * B->data()[i];
      break;
    }
    case Op::kAddRowVec:
    case Op::kSubRowVec: {
      if (B->rows() != 1 || B->cols() != A->cols())
        throw contract_error("Tape row-vec broadcast: shape mismatch");
      n.val = *A;
      const double sgn = n.op == Op::kAddRowVec ? 1.0 : -1.0;
      for (int r = 0; r < A->rows(); ++r)
        for (int c = 0; c < A->cols(); ++c) n.val(r, c) += sgn * (*B)(0, c);
      break;
    }
    case Op::kMul: {
      if (!A->same_shape(*B)) throw contract_error("Tape mul: shape mismatch");
      n.val = *A;
      for (size_t i = 0; i < n.val.size(); ++i) n.val.data()[i] *= B->data()[i];
      break;
    }
    case Op::kMulCol: {
      if (B->cols() != 1 || B->rows() != A->rows())
        throw contract_error("Tape mul_col: shape mismatch");
      n.val = *A;
      for (int r = 0; r < A->rows(); ++r) {
        const double s = (*B)(r, 0);
        for (int c = 0; c < A->cols(); ++c) n.val(r, c) *= s;
      }
      break;
    }
    case Op::kSiLU: {
      n.val = *A;
      for (size_t i = 0; i < n.val.size(); ++i) {
        const double x = A->data()[i];
        n.val.data()[i] = x * sigmoid_scalar(x);
      }
      break;
    }
    case Op::kSigmoid: {
      n.val = *A;
      for (size_t i = 0; i < n.val.size(); ++i)
        n.val.data()[i] = sigmoid_scalar(A->data()[i]);
      break;
    }
    case Op::kConcatCols: {
      if (A->rows() != B->rows()) throw contract_error("Tape concat_cols: row mismatch");
      n.val = Matrix(A->rows(), A->cols() + B->cols());
      for (int r = 0; r < A->rows(); ++r) {
        for (int c = 0; c < A->cols(); ++c) n.val(r, c) = (*A)(r, c);
        for (int c = 0; c < B->cols(); ++c) n.val(r, A->cols() + c) = (*B)(r, c);
      }
      break;
    }
    case Op::kGatherRows: {
      n.val = Matrix(static_cast<int>(n.index.size()), A->cols());
      for (size_t p = 0; p < n.index.size(); ++p) {
        const int r = n.index[p];
        if (r < 0 || r >= A->rows()) throw contract_error("Tape gather_rows: index out of range");
        for (int c = 0; c < A->cols(); ++c) n.val(static_cast<int>(p), c) = (*A)(r, c);
      }
      break;
    }
    case Op::kScatterAddRows: {
      if (static_cast<int>(n.index.size()) != A->rows())
        throw contract_error("Tape scatter_add_rows: index size mismatch");
      n.val = Matrix(n.aux_rows, A->cols());
      for (int p = 0; p < A->rows(); ++p) {
        const int r = n.index[static_cast<size_t>(p)];
        if (r < 0 || r >= n.aux_rows) throw contract_error("Tape scatter_add_rows: index out of range");
        for (int c = 0; c < A->cols(); ++c) n.val(r, c) += (*A)(p, c);
      }
      break;
    }
    case Op::kRowSqNorm: {
      n.val = Matrix(A->rows(), 1);
      for (int r = 0; r < A->rows(); ++r) {
        double acc = 0.0;
        for (int c = 0; c < A->cols(); ++c) acc += (*A)(r, c) * (*A)(r, c);
        n.val(r, 0) = acc;
      }
      break;
    }
    case Op::kSqrt: {
      n.val = *A;
      for (size_t i = 0; i < n.val.size(); ++i) n.val.data()[i] = std::sqrt(A->data()[i]);
      break;
    }
    case Op::kAddScalar: {
      n.val = *A;
      for (size_t i = 0; i < n.val.size(); ++i) n.val.data()[i] += n.scalar;
      break;
    }
    case Op::kScale: {
      n.val = *A;
      for (size_t i = 0; i < n.val.size(); ++i) n.val.data()[i] *= n.scalar;
      break;
    }
    case Op::kRecip: {
      n.val = *A;
      for (size_t i = 0; i < n.val.size(); ++i) n.val.data()[i] = 1.0 / A->data()[i];
      break;
    }
    case Op::kSum: {
      double acc = 0.0;
      for (size_t i = 0; i < A->size(); ++i) acc += A->data()[i];
      n.val = Matrix(1, 1);
      n.val(0, 0) = acc;
      break;
    }
    case Op::kSqNorm: {
      double acc = 0.0;
      for (size_t i = 0; i < A->size(); ++i) acc += A->data()[i] * A->data()[i];
      n.val = Matrix(1, 1);
      n.val(0, 0) = acc;
      break;
    }
    case Op::kColMean: {
      n.val = Matrix(1, A->cols());
      for (int r = 0; r < A->rows(); ++r)
        for (int c = 0; c < A->cols(); ++c) n.val(0, c) += (*A)(r, c);
      const double inv = 1.0 / A->rows();
      for (int c = 0; c < A->cols(); ++c) n.val(0, c) *= inv;
      break;
    }
  }
}

void Tape::replay() {
  for (NodeId id = 0; id < size(); ++id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.op == Op::kConst || n.op == Op::kLeaf) continue;
    compute(n);
    check(n, id);
  }
}

void Tape::backward(NodeId root) {
  const Matrix& rv = at(root).val;
  if (rv.rows() != 1 || rv.cols() != 1)
    throw contract_error("Tape::backward: root must be scalar");

  for (auto& n : nodes_) n.adj = Matrix(n.val.rows(), n.val.cols());
  at(root).adj(0, 0) = 1.0;

  for (NodeId id = root; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    const Matrix& g = n.adj;
    Matrix* dA = n.a >= 0 ? &nodes_[static_cast<size_t>(n.a)].adj : nullptr;
    Matrix* dB = n.b >= 0 ? &nodes_[static_cast<size_t>(n.b)].adj : nullptr;
    const Matrix* A = n.a >= 0 ? &nodes_[static_cast<size_t>(n.a)].val : nullptr;
    const Matrix* B = n.b >= 0 ? &nodes_[static_cast<size_t>(n.b)].val : nullptr;

    switch (n.op) {
      case Op::kConst:
      case Op::kLeaf:
        break;
      case Op::kMatMul:
        Matrix::matmul_a_bt_acc(g, *B, *dA);
        Matrix::matmul_at_b_acc(*A, g, *dB);
        break;
      case Op::kAdd:
        for (size_t i = 0; i < g.size(); ++i) {
          dA->data()[i] += g.data()[i];
          dB->data()[i] += g.data()[i];
        }
        break;
      case Op::kSub:
        for (size_t i = 0; i < g.size(); ++i) {
          dA->data()[i] += g.data()[i];
          dB->data()[i] -= g.data()[i];
        }
        break;
      case Op::kAddRowVec:
      case Op::kSubRowVec: {
        const double sgn = n.op == Op::kAddRowVec ? 1.0 : -1.0;
        for (int r = 0; r < g.rows(); ++r)
          for (int c = 0; c < g.cols(); ++c) {
            (*dA)(r, c) += g(r, c);
            (*dB)(0, c) += sgn * g(r, c);
          }
        break;
      }
      case Op::kMul:
        for (size_t i = 0; i < g.size(); ++i) {
          dA->data()[i] += g.data()[i] * B->data()[i];
          dB->data()[i] += g.data()[i] * A->data()[i];
        }
        break;
      case Op::kMulCol:
        for (int r = 0; r < g.rows(); ++r) {
          const double s = (*B)(r, 0);
          double acc = 0.0;
          for (int c = 0; c < g.cols(); ++c) {
            (*dA)(r, c) += g(r, c) * s;
            acc += g(r, c) * (*A)(r, c);
          }
          (*dB)(r, 0) += acc;
        }
        break;
      case Op::kSiLU:
        for (size_t i = 0; i < g.size(); ++i) {
          const double x = A->data()[i];
          const double s = sigmoid_scalar(x);
          dA->data()[i] += g.data()[i] * (s * (1.0 + x * (1.0 - s)));
        }
        break;
      case Op::kSigmoid:
        for (size_t i = 0; i < g.size(); ++i) {
          const double s = n.val.data()[i];
          dA->data()[i] += g.data()[i] * s * (1.0 - s);
        }
        break;
      case Op::kConcatCols:
        for (int r = 0; r < g.rows(); ++r) {
          for (int c = 0; c < A->cols(); ++c) (*dA)(r, c) += g(r, c);
          for (int c = 0; c < B->cols(); ++c) (*dB)(r, c) += g(r, A->cols() + c);
        }
        break;
      case Op::kGatherRows:
        for (size_t p = 0; p < n.index.size(); ++p)
          for (int c = 0; c < g.cols(); ++c)
            (*dA)(n.index[p], c) += g(static_cast<int>(p), c);
        break;
      case Op::kScatterAddRows:
        for (int p = 0; p < dA->rows(); ++p)
          for (int c = 0; c < g.cols(); ++c)
            (*dA)(p, c) += g(n.index[static_cast<size_t>(p)], c);
        break;
      case Op::kRowSqNorm:
        for (int r = 0; r < A->rows(); ++r) {
          const double gr = g(r, 0);
          for (int c = 0; c < A->cols(); ++c) (*dA)(r, c) += 2.0 * gr * (*A)(r, c);
        }
        break;
      case Op::kSqrt:
        for (size_t i = 0; i < g.size(); ++i)
          dA->data()[i] += g.data()[i] * 0.5 / n.val.data()[i];
        break;
      case Op::kAddScalar:
        for (size_t i = 0; i < g.size(); ++i) dA->data()[i] += g.data()[i];
        break;
      case Op::kScale:
        for (size_t i = 0; i < g.size(); ++i) dA->data()[i] += n.scalar * g.data()[i];
        break;
      case Op::kRecip:
        for (size_t i = 0; i < g.size(); ++i) {
          const double y = n.val.data()[i];
          dA->data()[i] -= g.data()[i] * y * y;
        }
        break;
      case Op::kSum: {
        const double gs = g(0, 0);
        for (size_t i = 0; i < dA->size(); ++i) dA->data()[i] += gs;
        break;
      }
      case Op::kSqNorm: {
        const double gs = g(0, 0);
        for (size_t i = 0; i < dA->size(); ++i) dA->data()[i] += 2.0 * gs * A->data()[i];
        break;
      }
      case Op::kColMean: {
        const double inv = 1.0 / A->rows();
        for (int r = 0; r < A->rows(); ++r)
          for (int c = 0; c < A->cols(); ++c) (*dA)(r, c) += inv * g(0, c);
        break;
      }
    }
  }
}

std::vector<double> grad(const RecordedFn& f, const ParamVector& at, double* value_out) {
  Tape tape;
  std::vector<Tape::NodeId> leaves;
  leaves.reserve(static_cast<size_t>(at.n_segments()));
  for (int i = 0; i < at.n_segments(); ++i) {
    const ParamSegment& s = at.segment(i);
    std::vector<double> vals(at.segment_data(i), at.segment_data(i) + s.count());
    leaves.push_back(tape.leaf(Matrix::from(s.rows, s.cols, std::move(vals))));
  }

  const Tape::NodeId root = f(tape, leaves);
  const Matrix& rv = tape.value(root);
  if (rv.rows() != 1 || rv.cols() != 1)
    throw contract_error("grad: recorded computation is not scalar-valued");
  if (value_out) *value_out = rv(0, 0);

  tape.backward(root);

  std::vector<double> g(at.size(), 0.0);
  for (int i = 0; i < at.n_segments(); ++i) {
    const ParamSegment& s = at.segment(i);
    const Matrix& adj = tape.adjoint(leaves[static_cast<size_t>(i)]);
    for (size_t k = 0; k < s.count(); ++k) g[s.offset + k] = adj.data()[k];
  }
  return g;
}

}  // namespace tbg::numcore
