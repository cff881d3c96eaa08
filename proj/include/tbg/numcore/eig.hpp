//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_EIG_HPP
#define TBG_NUMCORE_EIG_HPP

#include <vector>

#include "tbg/numcore/matrix.hpp"

namespace tbg::numcore {

struct SymEigResult {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]
};

// Generalized symmetric eigenproblem A w = lambda B w with B symmetric
// positive definite. Reduced to standard form via the Cholesky factor of B
// and solved by cyclic Jacobi rotations; eigenvectors are B-orthonormal
// (W^T B W = I). Throws contract_error if A or B is not symmetric within
// 1e-10 * max|entry|, and numeric_error if B is not positive definite.
SymEigResult sym_eig(const Matrix& a, const Matrix& b);

// Standard symmetric eigenproblem (B = I).
SymEigResult sym_eig(const Matrix& a);

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_EIG_HPP
