//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_VECFIELD_DENSE_FIELD_HPP
#define TBG_VECFIELD_DENSE_FIELD_HPP

#include <cstdint>
#include <vector>

#include "tbg/numcore/matrix.hpp"
#include "tbg/numcore/params.hpp"
#include "tbg/numcore/tape.hpp"
#include "tbg/vecfield/field.hpp"

namespace tbg::vecfield {

// Plain fully connected vector field v(t, x) on a flat state: input (t, x),
// SiLU hidden stack, linear output of state width. It has none of the graph
// field's symmetries, which makes it the negative control for equivariance
// tests and a fast stand-in when exercising flow and training machinery.
struct DenseFieldConfig {
  int n_state = 2;
  int n_hidden = 32;
  int n_layers = 2;  // hidden layers

  void validate() const;
};

// Segments "lin<k>.w"/"lin<k>.b" for the hidden stack and "out.w"/"out.b"
// for the head. The head starts at zero so a fresh field is identically
// zero; hidden pieces draw uniform +-1/sqrt(fan_in).
numcore::ParamVector init_dense_params(const DenseFieldConfig& cfg, std::uint64_t seed);

std::vector<double> dense_forward(const DenseFieldConfig& cfg, const numcore::ParamVector& params,
                                  double t, const std::vector<double>& x);

// Exact trace of dv/dx via one forward-mode pass per state coordinate.
double dense_divergence(const DenseFieldConfig& cfg, const numcore::ParamVector& params, double t,
                        const std::vector<double>& x, std::vector<double>* v_out = nullptr);

// Records the forward pass over a batch: x_node is (rows x n_state), rows
// independent; the result node has the same shape. param_leaves follow the
// init_dense_params layout.
numcore::Tape::NodeId dense_forward_tape(numcore::Tape& tape, const DenseFieldConfig& cfg,
                                         const std::vector<numcore::Tape::NodeId>& param_leaves,
                                         double t, numcore::Tape::NodeId x_node);

VectorField dense_field(const DenseFieldConfig& cfg, const numcore::ParamVector& params);

}  // namespace tbg::vecfield

#endif  // TBG_VECFIELD_DENSE_FIELD_HPP
