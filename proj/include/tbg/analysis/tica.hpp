//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_ANALYSIS_TICA_HPP
#define TBG_ANALYSIS_TICA_HPP

#include <string>
#include <vector>

#include "tbg/numcore/matrix.hpp"

namespace tbg::analysis {

// Time-lagged independent component analysis. The fit solves the generalized
// symmetric eigenproblem C_tau w = lambda C_0 w, where both covariances are
// estimated over the symmetrized pair ensemble {(f_t, f_{t+lag})} union
// {(f_{t+lag}, f_t)}: symmetrization makes C_tau symmetric and bounds every
// eigenvalue by 1 in magnitude (Cauchy-Schwarz on the exchange-invariant pair
// measure). C_0 gets a ridge of 1e-8 * trace/dim on the diagonal for rank
// safety on short trajectories.
struct TicaModel {
  int lag = 1;
  std::vector<double> feature_mean;  // over all frames (weighted if weights given)
  std::vector<double> eigenvalues;   // descending
  numcore::Matrix eigenvectors;      // column k pairs with eigenvalues[k]; C0-orthonormal
  std::string feature_definition;    // free-form tag recorded for provenance
};

// Periodic embedding of angles: column d of `angles` (frames x angles, radians)
// becomes columns (2d, 2d+1) = (sin, cos). Avoids branch-cut artifacts when
// angular coordinates cross +-pi.
numcore::Matrix sincos_features(const numcore::Matrix& angles);

// Fit on a trajectory of shape (frames x features). `frame_weights` may be
// empty (equal weights) or hold one non-negative weight per frame; a lagged
// pair (t, t+lag) is weighted by the weight of frame t. Requires
// frames > lag >= 1 and finite features.
TicaModel tica_fit(const numcore::Matrix& features, int lag,
                   const std::vector<double>& frame_weights = {},
                   std::string feature_definition = "");

// Project mean-centered features onto the eigenvector columns; output is
// (frames x components). The projection of the training data has zero
// (weighted) mean by construction.
numcore::Matrix tica_transform(const TicaModel& model, const numcore::Matrix& features);

}  // namespace tbg::analysis

#endif  // TBG_ANALYSIS_TICA_HPP
