//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_ANALYSIS_HISTOGRAMS_HPP
#define TBG_ANALYSIS_HISTOGRAMS_HPP

#include <vector>

#include "tbg/numcore/matrix.hpp"

namespace tbg::analysis {

// Free-energy profile along one coordinate, in units of k_B T:
// F_b = -log(sum of normalized weights in bin b), shifted so its minimum over
// defined bins is zero. Bins with no weight mass are masked (defined = 0);
// their value is NaN, never an imputed number.
struct FreeEnergyProfile {
  std::vector<double> edges;  // n_bins + 1 ascending bin edges
  std::vector<double> f;      // n_bins values; NaN where !defined
  std::vector<char> defined;  // n_bins flags: bin has weight mass > 0
};

// Weighted free-energy projection. `log_weights` may be empty (equal weights)
// or hold one log-weight per value; weights self-normalize, so any constant
// shift of the log-weights leaves the profile unchanged. Values must lie in
// [lo, hi]; values equal to hi land in the last bin.
FreeEnergyProfile free_energy_projection(const std::vector<double>& values,
                                         const std::vector<double>& log_weights, int n_bins,
                                         double lo, double hi);

// Weighted 2-D histogram over the torus (-pi, pi]^2 with periodic binning:
// the +pi and -pi boundaries fall in the same bin. Returns an n_bins x n_bins
// matrix of bin masses summing to one; entry (i, j) covers the i-th phi bin
// and j-th psi bin. `log_weights` may be empty (equal weights).
numcore::Matrix ramachandran_hist(const std::vector<double>& phi,
                                  const std::vector<double>& psi,
                                  const std::vector<double>& log_weights, int n_bins);

// Periodic bin index on (-pi, pi] for an angle in radians (shared by the
// histogram and the transport metric so both see identical discretization).
int periodic_bin(double angle, int n_bins);

// Center of periodic bin k on (-pi, pi].
double periodic_bin_center(int k, int n_bins);

}  // namespace tbg::analysis

#endif  // TBG_ANALYSIS_HISTOGRAMS_HPP
