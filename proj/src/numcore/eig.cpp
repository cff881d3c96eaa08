//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/numcore/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tbg/errors.hpp"

namespace tbg::numcore {

namespace {

void require_symmetric(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) throw contract_error(std::string(name) + " is not square");
  double amax = 0.0;
  for (size_t i = 0; i < m.size(); ++i) amax = std::max(amax, std::abs(m.data()[i]));
  const double tol = 1e-10 * std::max(amax, 1.0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw contract_error(std::string(name) + " is not symmetric");
}

// Lower-triangular Cholesky factor of an SPD matrix.
Matrix cholesky(const Matrix& b) {
  const int n = b.rows();
  Matrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = b(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw numeric_error("sym_eig: B is not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Solve L X = R (forward substitution), R overwritten columnwise.
void forward_solve(const Matrix& l, Matrix& r) {
  const int n = l.rows();
  for (int c = 0; c < r.cols(); ++c)
    for (int i = 0; i < n; ++i) {
      double s = r(i, c);
      for (int k = 0; k < i; ++k) s -= l(i, k) * r(k, c);
      r(i, c) = s / l(i, i);
    }
}

// Solve L^T X = R (back substitution).
void backward_solve_t(const Matrix& l, Matrix& r) {
  const int n = l.rows();
  for (int c = 0; c < r.cols(); ++c)
    for (int i = n - 1; i >= 0; --i) {
      double s = r(i, c);
      for (int k = i + 1; k < n; ++k) s -= l(k, i) * r(k, c);
      r(i, c) = s / l(i, i);
    }
}

// Cyclic Jacobi on a symmetric matrix; accumulates rotations into V.
void jacobi(Matrix& a, Matrix& v) {
  const int n = a.rows();
  v = Matrix(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    double diag = 0.0;
    for (int p = 0; p < n; ++p) diag += a(p, p) * a(p, p);
    if (off <= 1e-26 * std::max(diag, 1e-300)) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace

SymEigResult sym_eig(const Matrix& a) {
  require_symmetric(a, "A");
  const int n = a.rows();
  Matrix d = a, v;
  jacobi(d, v);

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return d(i, i) > d(j, j); });

  SymEigResult res;
  res.eigenvalues.resize(static_cast<size_t>(n));
  res.eigenvectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    res.eigenvalues[static_cast<size_t>(k)] = d(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]);
    for (int i = 0; i < n; ++i) res.eigenvectors(i, k) = v(i, order[static_cast<size_t>(k)]);
  }
  return res;
}

SymEigResult sym_eig(const Matrix& a, const Matrix& b) {
  require_symmetric(a, "A");
  require_symmetric(b, "B");
  if (a.rows() != b.rows()) throw contract_error("sym_eig: A and B sizes differ");

  // B = L L^T; solve the standard problem for C = L^-1 A L^-T, then map the
  // eigenvectors back with W = L^-T Y so that W^T B W = I.
  const Matrix l = cholesky(b);
  Matrix c = a;
  forward_solve(l, c);  // C = L^-1 A
  // Transpose, forward-solve again, transpose back: C = L^-1 A L^-T.
  Matrix ct(c.cols(), c.rows());
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) ct(j, i) = c(i, j);
  forward_solve(l, ct);
  Matrix cs(ct.cols(), ct.rows());
  for (int i = 0; i < ct.rows(); ++i)
    for (int j = 0; j < ct.cols(); ++j) cs(j, i) = ct(i, j);
  // Symmetrize against round-off before Jacobi.
  for (int i = 0; i < cs.rows(); ++i)
    for (int j = i + 1; j < cs.cols(); ++j) {
      const double m = 0.5 * (cs(i, j) + cs(j, i));
      cs(i, j) = m;
      cs(j, i) = m;
    }

  SymEigResult std_res = sym_eig(cs);
  backward_solve_t(l, std_res.eigenvectors);
  return std_res;
}

}  // namespace tbg::numcore
