//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_ADAM_HPP
#define TBG_NUMCORE_ADAM_HPP

#include <cstdint>
#include <vector>

#include "tbg/numcore/params.hpp"

namespace tbg::numcore {

// First/second moment accumulators plus the bias-correction step counter.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  static AdamState zeros(std::size_t n) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    return s;
  }
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update, in place. Throws numeric_error on a
// non-finite gradient and contract_error on size mismatches.
void adam_step(ParamVector& params, const std::vector<double>& grad, AdamState& state,
               double lr, const AdamOptions& opt = {});

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_ADAM_HPP
