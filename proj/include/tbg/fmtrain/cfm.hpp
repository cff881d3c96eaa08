//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_FMTRAIN_CFM_HPP
#define TBG_FMTRAIN_CFM_HPP

#include <functional>
#include <vector>

#include "tbg/numcore/matrix.hpp"
#include "tbg/numcore/params.hpp"
#include "tbg/numcore/rng.hpp"
#include "tbg/vecfield/egnn.hpp"

namespace tbg::fmtrain {

// One training pair: a prior draw x0, a data frame x1, an interpolation time
// t, and the noisy interpolant xt the network is evaluated at. The
// regression target is the straight-line velocity x1 - x0.
struct FlowMatchItem {
  int molecule_id = 0;  // index into the per-molecule embedding list
  std::vector<double> x0;
  std::vector<double> x1;
  std::vector<double> xt;
  double t = 0.0;
  double bias_weight = 1.0;

  int n_atoms(int dim) const { return static_cast<int>(x0.size()) / dim; }
};

using FlowMatchBatch = std::vector<FlowMatchItem>;

// x_t = t*x1 + (1-t)*x0 + sigma*xi with xi standard normal projected to the
// mean-free subspace, so the interpolant stays where the field lives.
// sigma = 0 reproduces the endpoints exactly at t = 0 and t = 1.
std::vector<double> sample_conditional(const std::vector<double>& x0,
                                       const std::vector<double>& x1, double t, double sigma,
                                       int dim, numcore::Rng& rng);

// Per-batch loss: mean over items of
//   bias_weight * (1/n_atoms) * ||v(item) - (x1 - x0)||^2.
// The velocity is supplied by a callback writing n_atoms*dim values, which
// lets tests substitute analytic fields for the network.
using ItemVelocity = std::function<void(const FlowMatchItem& item, double* v)>;
double cfm_loss(const FlowMatchBatch& batch, const ItemVelocity& velocity, int dim);

// Same loss with the equivariant network as the velocity (plain evaluation).
double cfm_loss_egnn(const vecfield::EgnnConfig& cfg, const numcore::ParamVector& params,
                     const FlowMatchBatch& batch,
                     const std::vector<numcore::Matrix>& embeddings, int dim);

// Loss and its parameter gradient in one reverse pass over a tape holding
// the whole batch. grad must have params.size() entries.
double cfm_loss_egnn_grad(const vecfield::EgnnConfig& cfg, const numcore::ParamVector& params,
                          const FlowMatchBatch& batch,
                          const std::vector<numcore::Matrix>& embeddings, int dim,
                          std::vector<double>& grad);

}  // namespace tbg::fmtrain

#endif  // TBG_FMTRAIN_CFM_HPP
