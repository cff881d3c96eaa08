//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_ODE_HPP
#define TBG_NUMCORE_ODE_HPP

#include <functional>
#include <vector>

namespace tbg::numcore {

// dy/dt = f(t, y); y and dydt have length dim.
using OdeRhs = std::function<void(double t, const double* y, double* dydt)>;

enum class OdeScheme { kRk4, kDopri5 };

struct OdeOptions {
  OdeScheme scheme = OdeScheme::kRk4;
  int steps = 100;      // fixed-step RK4 step count
  double rtol = 1e-5;   // adaptive only
  double atol = 1e-6;   // adaptive only
  double h_init = 0.0;  // adaptive initial step; 0 = (t1-t0)/100
  int max_steps = 200000;
};

struct OdeResult {
  std::vector<double> y;
  int n_evals = 0;
  int n_steps = 0;
  int n_rejected = 0;
};

// Classic fixed-step fourth-order Runge-Kutta. Deterministic and direction
// agnostic (t1 < t0 integrates backwards).
OdeResult rk4_integrate(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                        double t0, double t1, int steps);

// Same, but also records the state at every grid point. `path` receives
// steps+1 rows of length dim, starting with y0's copy at t0.
OdeResult rk4_path(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                   double t0, double t1, int steps, std::vector<std::vector<double>>& path);

// Adaptive Dormand-Prince 5(4) with standard PI-free step control
// (safety 0.9, factor clamp [0.2, 5]). Used only where no log-density
// accounting is required.
OdeResult dopri5_integrate(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                           double t0, double t1, const OdeOptions& opt);

// Front door used by flow code: dispatches on opt.scheme.
OdeResult rk_integrate(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                       double t0, double t1, const OdeOptions& opt);

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_ODE_HPP
