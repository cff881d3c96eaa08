//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_TARGETS_SAMPLER_HPP
#define TBG_TARGETS_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "tbg/targets/target.hpp"

namespace tbg::targets {

struct McmcOptions {
  int n_chains = 4;
  long burn_in = 4000;        // adaptation steps per chain
  int stride = 10;            // thinning
  double init_step = 0.1;
  double target_accept = 0.4;
  std::uint64_t seed = 1;
  double init_jitter = 0.02;  // per-coordinate start perturbation
};

struct McmcDiagnostics {
  double acceptance = 0.0;  // post-adaptation, pooled over chains
  double step = 0.0;        // final step of the last chain
  long n_proposals = 0;
};

// Random-walk Metropolis with multiplicative step adaptation during burn-in
// only (the sampling phase is a fixed, reversible kernel). Runs n_chains
// independent chains from jittered copies of x0 and interleaves nothing:
// chain c contributes its thinned states in order. Throws if the
// post-adaptation acceptance rate leaves [0.2, 0.6].
SampleBlock reference_sampler(const BoltzmannTarget& target, const std::vector<double>& x0,
                              long count, const McmcOptions& opt,
                              McmcDiagnostics* diag = nullptr);

}  // namespace tbg::targets

#endif  // TBG_TARGETS_SAMPLER_HPP
