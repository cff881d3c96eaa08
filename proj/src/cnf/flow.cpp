//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/cnf/flow.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tbg/errors.hpp"
#include "tbg/numcore/quadrature.hpp"

namespace tbg::cnf {
namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_field_state(const vecfield::VectorField& field, const std::vector<double>& x) {
  if (!field.eval) throw contract_error("flow: field has no eval callback");
  if (!field.divergence) throw contract_error("flow: field has no divergence callback");
  if (static_cast<std::size_t>(field.n_state) != x.size()) {
    throw contract_error("flow: state has " + std::to_string(x.size()) +
                         " entries, field expects " + std::to_string(field.n_state));
  }
}

// Shared by push_forward (t0=0, t1=1) and pull_back (t0=1, t1=0): RK4 on the
// state with the path recorded, then Simpson over divergence values taken at
// grid nodes. Both directions evaluate the divergence at the same absolute
// times, so the quadrature error cancels exactly in round trips.
FlowResult integrate(const vecfield::VectorField& field, const std::vector<double>& x,
                     double t0, double t1, const FlowSolverConfig& cfg) {
  cfg.validate();
  check_field_state(field, x);

  FlowResult res;
  numcore::OdeRhs rhs = [&field](double t, const double* y, double* dydt) {
    field.eval(t, y, dydt);
  };

  std::vector<std::vector<double>> path;
  numcore::OdeResult ode =
      numcore::rk4_path(rhs, field.n_state, x, t0, t1, cfg.n_steps, path);
  res.nfe = ode.n_evals;
  if (!all_finite(ode.y)) {
    throw numeric_error("flow: integration from t=" + std::to_string(t0) + " to t=" +
                        std::to_string(t1) + " produced a non-finite state");
  }

  const int stride = cfg.n_steps / cfg.n_div_intervals;
  std::vector<double> div_at_node(static_cast<std::size_t>(cfg.n_div_intervals) + 1);
  for (int k = 0; k <= cfg.n_div_intervals; ++k) {
    const double t_node = static_cast<double>(k) / cfg.n_div_intervals;  // ascending in [0,1]
    const int row = (t1 > t0) ? k * stride : cfg.n_steps - k * stride;
    div_at_node[static_cast<std::size_t>(k)] =
        field.divergence(t_node, path[static_cast<std::size_t>(row)].data(), nullptr);
    ++res.nfe_div;
  }
  const double integral = numcore::simpson(
      [&div_at_node, &cfg](double t) {
        const long k = std::lround(t * cfg.n_div_intervals);
        return div_at_node[static_cast<std::size_t>(k)];
      },
      0.0, 1.0, cfg.n_div_intervals);
  if (!std::isfinite(integral)) {
    throw numeric_error("flow: divergence integral is non-finite");
  }

  // delta_logdet = -(integral of div along travel); the stored integral runs
  // over ascending t, so backward travel flips its sign twice into a plus.
  res.delta_logdet = (t1 > t0) ? -integral : integral;
  res.endpoint = std::move(ode.y);
  return res;
}

}  // namespace

void FlowSolverConfig::validate() const {
  if (n_steps < 2) throw config_error("flow: n_steps must be >= 2");
  if (n_div_intervals < 2 || n_div_intervals % 2 != 0) {
    throw config_error("flow: n_div_intervals must be even and >= 2");
  }
  if (n_steps % n_div_intervals != 0) {
    throw config_error("flow: n_div_intervals must divide n_steps so quadrature nodes lie on "
                       "the integration grid");
  }
}

FlowResult push_forward(const vecfield::VectorField& field, const std::vector<double>& x0,
                        const FlowSolverConfig& cfg) {
  return integrate(field, x0, 0.0, 1.0, cfg);
}

FlowResult pull_back(const vecfield::VectorField& field, const std::vector<double>& x,
                     const FlowSolverConfig& cfg) {
  return integrate(field, x, 1.0, 0.0, cfg);
}

double model_logprob(const vecfield::VectorField& field, const MeanFreePrior& prior,
                     const std::vector<double>& x, const FlowSolverConfig& cfg,
                     double* projection_dist) {
  prior.validate();
  std::vector<double> centered = x;
  const double dist = project_mean_free(centered, prior.dim);
  if (projection_dist != nullptr) *projection_dist = dist;
  FlowResult res = pull_back(field, centered, cfg);
  return prior_logprob(prior, res.endpoint) - res.delta_logdet;
}

std::vector<double> transform_only(const vecfield::VectorField& field,
                                   const std::vector<double>& x, bool forward,
                                   const numcore::OdeOptions& opt, int* nfe) {
  check_field_state(field, x);
  numcore::OdeRhs rhs = [&field](double t, const double* y, double* dydt) {
    field.eval(t, y, dydt);
  };
  const double t0 = forward ? 0.0 : 1.0;
  const double t1 = forward ? 1.0 : 0.0;
  numcore::OdeResult ode = numcore::rk_integrate(rhs, field.n_state, x, t0, t1, opt);
  if (nfe != nullptr) *nfe = ode.n_evals;
  if (!all_finite(ode.y)) {
    throw numeric_error("flow: transform produced a non-finite state");
  }
  return ode.y;
}

}  // namespace tbg::cnf
