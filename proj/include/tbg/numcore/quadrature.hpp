//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_QUADRATURE_HPP
#define TBG_NUMCORE_QUADRATURE_HPP

#include "tbg/errors.hpp"

namespace tbg::numcore {

// Composite Simpson rule with n subintervals (n even, rounded up if odd).
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  if (n < 2) throw contract_error("simpson: need at least 2 subintervals");
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_QUADRATURE_HPP
