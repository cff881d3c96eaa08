//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_CNF_PRIOR_HPP
#define TBG_CNF_PRIOR_HPP

#include <cstdint>
#include <vector>

#include "tbg/numcore/rng.hpp"

namespace tbg::cnf {

// Standard normal over particle coordinates restricted to the mean-free
// subspace (per-axis geometric mean zero). Removing the translation degrees
// of freedom leaves an effective dimension of dim*(n_atoms-1), which is the
// normalizer log_prob uses; that makes densities comparable across systems
// and matches the flow, whose fields keep the subspace invariant.
struct MeanFreePrior {
  int n_atoms = 2;
  int dim = 3;

  int effective_dim() const { return dim * (n_atoms - 1); }
  void validate() const;  // n_atoms >= 2, dim >= 1
};

// Subtracts the per-axis mean in place and returns the Euclidean distance
// between the input and its projection.
double project_mean_free(std::vector<double>& x, int dim);

// Largest per-axis mean magnitude, the quantity the tolerance checks gate on.
double mean_free_defect(const std::vector<double>& x, int dim);

// One draw: i.i.d. standard normals projected to zero mean per axis.
std::vector<double> prior_sample(const MeanFreePrior& prior, numcore::Rng& rng);

// `count` draws with one counter-derived generator per sample, so sample i
// is the same no matter how many are requested or how work is split.
std::vector<std::vector<double>> prior_samples(const MeanFreePrior& prior, long count,
                                               std::uint64_t seed);

// log density on the mean-free subspace: -|x|^2/2 - (D'/2) log(2pi) with
// D' = dim*(n_atoms-1). Inputs with a per-axis mean magnitude up to 1e-9 are
// projected silently; anything larger is a contract violation.
double prior_logprob(const MeanFreePrior& prior, const std::vector<double>& x);

}  // namespace tbg::cnf

#endif  // TBG_CNF_PRIOR_HPP
