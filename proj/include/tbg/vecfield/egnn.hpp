//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_VECFIELD_EGNN_HPP
#define TBG_VECFIELD_EGNN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tbg/numcore/matrix.hpp"
#include "tbg/numcore/params.hpp"
#include "tbg/numcore/tape.hpp"
#include "tbg/vecfield/field.hpp"

namespace tbg::vecfield {

// Equivariant graph vector field v(t, x) over a fully connected atom graph.
//
// Node features start as h_i = (t, emb_i). Each layer runs, for every
// ordered pair (i, j), i != j, with d_ij = sqrt(|x_i - x_j|^2 + 1e-12):
//
//   m_ij   = phi_e(h_i, h_j, d_ij^2)                    message, width M
//   x_i   += sum_j (x_i - x_j) / (d_ij + 1) * phi_d(m_ij)
//   m_i    = sum_j phi_m(m_ij) * m_ij                   attention aggregation
//   h_i    = phi_h(h_i, m_i)
//
// and the output velocity is (x^L - x^0) minus its mean over atoms, so the
// field is mean-free by construction. Every subnetwork is a one-hidden-layer
// perceptron of width n_hidden with SiLU activations; phi_d and phi_m end in
// a scalar (phi_m optionally squashed by a sigmoid), phi_e ends in SiLU,
// phi_h has a linear output. The same weights serve any atom count and any
// spatial dimension.
struct EgnnConfig {
  int n_layers = 5;
  int n_hidden = 64;
  int n_embedding = 15;
  bool attention_sigmoid = true;  // squash phi_m output to (0, 1)

  int feature_dim() const { return 1 + n_embedding; }  // (t, emb)
  void validate() const;

  // Named hyperparameter sets for the published model sizes.
  //   transfer-tbg           L=9  n_hidden=128 n_embedding=5
  //   transfer-tbg-backbone  L=9  n_hidden=128 n_embedding=13
  //   transfer-tbg-full      L=9  n_hidden=128 n_embedding=76
  //   single-tbg-full        L=5  n_hidden=64  n_embedding=15
  //   single-backbone        L=5  n_hidden=64  n_embedding=8
  static EgnnConfig preset(const std::string& name);
};

// Parameter layout: 16 segments per layer, in this order, named
// "l<layer>.<net>.<piece>" with net in {e, d, m, h} and piece in
// {w1, b1, w2, b2}. Weights are (in x out) row-major; biases are (1 x out).
// The displacement head (d.w2, d.b2) starts at zero so a freshly initialized
// field is identically zero and the untrained flow is the identity map; all
// other pieces draw uniform +-1/sqrt(fan_in).
numcore::ParamVector init_egnn_params(const EgnnConfig& cfg, std::uint64_t seed);

// Velocity for flat coordinates x (n_atoms x dim, atom-major). emb must be
// n_atoms x n_embedding. Requires n_atoms >= 2. Components of the result sum
// to zero per axis.
std::vector<double> egnn_forward(const EgnnConfig& cfg, const numcore::ParamVector& params,
                                 double t, const std::vector<double>& x,
                                 const numcore::Matrix& emb, int dim);

// Exact trace of dv/dx via one forward-mode pass per coordinate. If v_out is
// non-null it receives the velocity from the same evaluation.
double egnn_divergence(const EgnnConfig& cfg, const numcore::ParamVector& params, double t,
                       const std::vector<double>& x, const numcore::Matrix& emb, int dim,
                       std::vector<double>* v_out = nullptr);

// Records the forward pass on a tape for reverse-mode parameter gradients.
// param_leaves must hold one node per parameter segment, in layout order
// (as produced by numcore::grad over an init_egnn_params vector). x_node is
// an (n_atoms x dim) node; the returned node is the (n_atoms x dim) velocity.
numcore::Tape::NodeId egnn_forward_tape(numcore::Tape& tape, const EgnnConfig& cfg,
                                        const std::vector<numcore::Tape::NodeId>& param_leaves,
                                        double t, numcore::Tape::NodeId x_node,
                                        const numcore::Matrix& emb);

// Packages the network as an integrable field over flat coordinates of size
// emb.rows() * dim. Copies config, parameters, and embeddings, so the result
// outlives its arguments.
VectorField egnn_field(const EgnnConfig& cfg, const numcore::ParamVector& params,
                       const numcore::Matrix& emb, int dim);

}  // namespace tbg::vecfield

#endif  // TBG_VECFIELD_EGNN_HPP
