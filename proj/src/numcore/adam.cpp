//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/numcore/adam.hpp"

#include <cmath>

#include "tbg/errors.hpp"

namespace tbg::numcore {

void adam_step(ParamVector& params, const std::vector<double>& grad, AdamState& state,
               double lr, const AdamOptions& opt) {
  const std::size_t n = params.size();
  if (grad.size() != n) throw contract_error("adam_step: gradient size mismatch");
  if (state.m.size() != n || state.v.size() != n)
    throw contract_error("adam_step: state size mismatch");

  for (double g : grad)
    if (!std::isfinite(g)) throw numeric_error("adam_step: non-finite gradient");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.step));

  double* p = params.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * g;
    state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + opt.eps);
  }
}

}  // namespace tbg::numcore
