//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_ANALYSIS_WASSERSTEIN_HPP
#define TBG_ANALYSIS_WASSERSTEIN_HPP

#include <vector>

#include "tbg/numcore/matrix.hpp"

namespace tbg::analysis {

// Entropically regularized optimal transport between torsion-angle
// distributions: both sample sets are discretized onto the same periodic
// n_bins x n_bins grid over (-pi, pi]^2, the ground metric is the torus
// geodesic distance between bin centers, and the transport problem is solved
// by log-domain Sinkhorn iteration with stepwise regularization annealing
// down to `epsilon`. The reported distance is the transport cost of the
// regularized plan; grid and regularization are recorded in the result so
// numbers are only ever compared at matching settings.
struct WassersteinConfig {
  int n_bins = 60;
  double epsilon = 1e-3;
  int max_iters = 20000;  // total iteration budget across annealing levels
  double tol = 1e-6;      // L1 marginal residual required at the final level
};

struct WassersteinResult {
  double distance = 0.0;
  double regularization_floor = 0.0;  // = epsilon; self-distance stays below this
  double epsilon = 0.0;
  int n_bins = 0;
  int n_iters = 0;
  double marginal_residual = 0.0;
};

// Geodesic distance between two points of the flat torus (-pi, pi]^2.
double torus_distance(double phi_a, double psi_a, double phi_b, double psi_b);

// Regularized transport cost between histograms `a` and `b` under the given
// cost matrix (cost(i, j) moves mass from a-bin i to b-bin j). Masses must be
// non-negative with positive total; they are normalized internally. Throws
// numeric_error when the iteration budget is exhausted before the marginal
// residual reaches `tol`.
double sinkhorn_distance(const std::vector<double>& a, const std::vector<double>& b,
                         const numcore::Matrix& cost, double epsilon, int max_iters,
                         double tol, int* n_iters_out = nullptr,
                         double* residual_out = nullptr);

// Full pipeline: periodic histograms of both angle sets, torus ground metric
// on occupied bins, Sinkhorn transport. `log_weights_*` may be empty (equal
// weights per sample).
WassersteinResult ramachandran_wasserstein(const std::vector<double>& phi_p,
                                           const std::vector<double>& psi_p,
                                           const std::vector<double>& log_weights_p,
                                           const std::vector<double>& phi_q,
                                           const std::vector<double>& psi_q,
                                           const std::vector<double>& log_weights_q,
                                           const WassersteinConfig& config = {});

}  // namespace tbg::analysis

#endif  // TBG_ANALYSIS_WASSERSTEIN_HPP
