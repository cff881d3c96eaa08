//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_VECFIELD_FIELD_HPP
#define TBG_VECFIELD_FIELD_HPP

#include <functional>

namespace tbg::vecfield {

// Time-dependent vector field over a flat state of fixed size, the interface
// the flow integrator consumes. Implementations must be pure: same (t, x)
// always gives the same outputs, so integration is deterministic and safe to
// run concurrently on disjoint states.
struct VectorField {
  int n_state = 0;

  // v <- v(t, x); both arrays have n_state entries.
  std::function<void(double t, const double* x, double* v)> eval;

  // Returns the exact trace of dv/dx at (t, x). When v is non-null it also
  // receives the velocity from the same evaluation.
  std::function<double(double t, const double* x, double* v)> divergence;
};

}  // namespace tbg::vecfield

#endif  // TBG_VECFIELD_FIELD_HPP
