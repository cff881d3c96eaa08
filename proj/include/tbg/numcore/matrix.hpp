//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_MATRIX_HPP
#define TBG_NUMCORE_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "tbg/errors.hpp"

namespace tbg::numcore {

// Small dense row-major matrix. This is deliberately minimal: the tape and
// the eigensolver need storage plus a handful of kernels, nothing more.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw contract_error("Matrix: negative shape");
  }
  static Matrix from(int rows, int cols, std::vector<double> values) {
    if (static_cast<size_t>(rows) * cols != values.size())
      throw contract_error("Matrix::from: size mismatch");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(values);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  // c = a * b
  static void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.cols_ != b.rows_) throw contract_error("matmul: inner dims differ");
    c = Matrix(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      double* ci = &c.data_[static_cast<size_t>(i) * c.cols_];
      for (int k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        const double* bk = &b.data_[static_cast<size_t>(k) * b.cols_];
        for (int j = 0; j < b.cols_; ++j) ci[j] += aik * bk[j];
      }
    }
  }

  // c += a^T * b
  static void matmul_at_b_acc(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.rows_ != b.rows_) throw contract_error("matmul_at_b: outer dims differ");
    if (c.rows_ != a.cols_ || c.cols_ != b.cols_) throw contract_error("matmul_at_b: bad out shape");
    for (int k = 0; k < a.rows_; ++k) {
      const double* ak = &a.data_[static_cast<size_t>(k) * a.cols_];
      const double* bk = &b.data_[static_cast<size_t>(k) * b.cols_];
      for (int i = 0; i < a.cols_; ++i) {
        const double aki = ak[i];
        if (aki == 0.0) continue;
        double* ci = &c.data_[static_cast<size_t>(i) * c.cols_];
        for (int j = 0; j < b.cols_; ++j) ci[j] += aki * bk[j];
      }
    }
  }

  // c += a * b^T
  static void matmul_a_bt_acc(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.cols_ != b.cols_) throw contract_error("matmul_a_bt: inner dims differ");
    if (c.rows_ != a.rows_ || c.cols_ != b.rows_) throw contract_error("matmul_a_bt: bad out shape");
    for (int i = 0; i < a.rows_; ++i) {
      const double* ai = &a.data_[static_cast<size_t>(i) * a.cols_];
      double* ci = &c.data_[static_cast<size_t>(i) * c.cols_];
      for (int j = 0; j < b.rows_; ++j) {
        const double* bj = &b.data_[static_cast<size_t>(j) * b.cols_];
        double acc = 0.0;
        for (int k = 0; k < a.cols_; ++k) acc += ai[k] * bj[k];
        ci[j] += acc;
      }
    }
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_MATRIX_HPP
