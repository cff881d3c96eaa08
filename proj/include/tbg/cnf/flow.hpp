//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_CNF_FLOW_HPP
#define TBG_CNF_FLOW_HPP

#include <vector>

#include "tbg/cnf/prior.hpp"
#include "tbg/numcore/ode.hpp"
#include "tbg/vecfield/field.hpp"

namespace tbg::cnf {

// Continuous normalizing flow driven by a VectorField over t in [0, 1].
// push_forward integrates prior points 0 -> 1 into samples; pull_back runs
// the same dynamics 1 -> 0. Both report delta_logdet, the log-density
// change along the direction of travel:
//
//   log p_end(endpoint) = log p_start(start) + delta_logdet,
//   delta_logdet = -(integral of div v dt) from t_start to t_end.
//
// Reversing a trajectory negates delta_logdet, so
// model_logprob(x) = prior_logprob(pull_back(x).endpoint) - pull_back(x).delta_logdet.
//
// The state is advanced with fixed-step RK4 on a grid of n_steps intervals;
// the divergence integral is a composite Simpson rule over n_div_intervals
// subintervals whose nodes lie on that grid, evaluated on the stored path.
// Forward and backward passes therefore quadrature the same node times,
// which makes the antisymmetry hold to solver accuracy rather than
// quadrature accuracy.
struct FlowSolverConfig {
  int n_steps = 100;         // RK4 intervals on [0, 1]
  int n_div_intervals = 20;  // Simpson subintervals; even, must divide n_steps
  void validate() const;     // throws config_error
};

struct FlowResult {
  std::vector<double> endpoint;
  double delta_logdet = 0.0;
  int nfe = 0;      // plain field evaluations (state integration)
  int nfe_div = 0;  // divergence evaluations (each costs ~n_state forward passes)
};

// Integrate x0 from t=0 to t=1. For a field with div v constant at -c the
// result has delta_logdet = +c (density spreads as the map contracts).
FlowResult push_forward(const vecfield::VectorField& field, const std::vector<double>& x0,
                        const FlowSolverConfig& cfg);

// Integrate x from t=1 down to t=0; delta_logdet is again along travel, so
// pull_back(push_forward(x0).endpoint) recovers x0 and negates delta_logdet
// up to solver error.
FlowResult pull_back(const vecfield::VectorField& field, const std::vector<double>& x,
                     const FlowSolverConfig& cfg);

// Exact-likelihood evaluation: pulls x back to the prior and combines the
// prior density with the travel log-det. x is projected to the mean-free
// subspace first; pass projection_dist to observe how far it moved.
double model_logprob(const vecfield::VectorField& field, const MeanFreePrior& prior,
                     const std::vector<double>& x, const FlowSolverConfig& cfg,
                     double* projection_dist = nullptr);

// Endpoint-only transform without log-det accounting, for cheap sample
// generation. forward=true maps t 0 -> 1, else 1 -> 0. Honors opt.scheme
// (fixed RK4 or adaptive Dormand-Prince).
std::vector<double> transform_only(const vecfield::VectorField& field,
                                   const std::vector<double>& x, bool forward,
                                   const numcore::OdeOptions& opt, int* nfe = nullptr);

}  // namespace tbg::cnf

#endif  // TBG_CNF_FLOW_HPP
