//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_REWEIGHT_WEIGHTS_HPP
#define TBG_REWEIGHT_WEIGHTS_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace tbg::reweight {

// One generated batch with everything importance reweighting needs. The
// arrays are parallel, one entry per sample; `samples` may be left empty
// when observables are supplied as precomputed values.
struct WeightedEnsemble {
  std::vector<std::vector<double>> samples;  // coordinates, optional
  std::vector<double> model_logprob;         // log of the sampling density
  std::vector<double> energy;                // target energy in thermal units
  std::vector<char> valid;                   // 1 = counted, 0 = weight zero
  std::vector<double> log_weight;            // unnormalized; set by compute_weights
  std::uint64_t seed = 0;                    // provenance of the batch

  std::size_t size() const { return model_logprob.size(); }
  void validate_shape() const;  // parallel arrays agree; throws contract_error
};

// log w = -energy - model_logprob for valid samples; invalid samples get
// -inf so they normalize to exactly zero. NaN inputs on valid samples are
// rejected; +/-inf energies are allowed and saturate to zero weight.
// Throws numeric_error when no sample has support.
void compute_weights(WeightedEnsemble& e);

// Normalized weights summing to 1 over valid samples (0 for invalid),
// stabilized by a single max-subtraction before exponentiation.
std::vector<double> normalized_weights(const std::vector<double>& log_weights);

// Kish effective sample size, relative: (sum w)^2 / (n * sum w^2) with n the
// full batch size including zero-weight entries. Invariant under rescaling.
// Entries must be finite or -inf; at least one finite entry is required.
double kish_ess(const std::vector<double>& log_weights);

// Self-normalized importance estimate sum(w*O) / sum(w) from precomputed
// per-sample observable values.
double weighted_observable(const WeightedEnsemble& e, const std::vector<double>& obs_values);

// Same, evaluating the observable on e.samples (which must be populated).
double weighted_observable(const WeightedEnsemble& e,
                           const std::function<double(const std::vector<double>&)>& obs);

}  // namespace tbg::reweight

#endif  // TBG_REWEIGHT_WEIGHTS_HPP
