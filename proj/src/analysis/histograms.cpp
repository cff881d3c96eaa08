//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/analysis/histograms.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tbg/errors.hpp"
#include "tbg/reweight/weights.hpp"

namespace tbg::analysis {

using numcore::Matrix;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAngleSlack = 1e-12;

std::vector<double> resolve_weights(std::size_t n, const std::vector<double>& log_weights,
                                    const char* who) {
  if (n == 0) throw contract_error(std::string(who) + ": empty input");
  if (log_weights.empty()) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }
  if (log_weights.size() != n) {
    throw contract_error(std::string(who) + ": log_weights length does not match values");
  }
  return reweight::normalized_weights(log_weights);
}

}  // namespace

int periodic_bin(double angle, int n_bins) {
  if (!(std::fabs(angle) <= kPi + kAngleSlack)) {
    throw contract_error("periodic_bin: angle outside [-pi, pi]");
  }
  const double u = (angle + kPi) / (2.0 * kPi);
  long k = static_cast<long>(std::floor(u * n_bins));
  k %= n_bins;
  if (k < 0) k += n_bins;
  return static_cast<int>(k);
}

double periodic_bin_center(int k, int n_bins) {
  return -kPi + (k + 0.5) * (2.0 * kPi / n_bins);
}

FreeEnergyProfile free_energy_projection(const std::vector<double>& values,
                                         const std::vector<double>& log_weights, int n_bins,
                                         double lo, double hi) {
  if (n_bins < 1) throw contract_error("free_energy_projection: n_bins must be >= 1");
  if (!(lo < hi)) throw contract_error("free_energy_projection: empty coordinate range");
  const std::vector<double> w = resolve_weights(values.size(), log_weights,
                                                "free_energy_projection");

  std::vector<double> mass(static_cast<std::size_t>(n_bins), 0.0);
  const double width = (hi - lo) / n_bins;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v) || v < lo || v > hi) {
      throw contract_error("free_energy_projection: value " + std::to_string(i) +
                           " outside the binning range");
    }
    long b = static_cast<long>(std::floor((v - lo) / width));
    if (b >= n_bins) b = n_bins - 1;  // v == hi
    if (b < 0) b = 0;
    mass[static_cast<std::size_t>(b)] += w[i];
  }

  FreeEnergyProfile profile;
  profile.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int b = 0; b <= n_bins; ++b) {
    profile.edges[static_cast<std::size_t>(b)] = lo + b * width;
  }
  profile.f.assign(static_cast<std::size_t>(n_bins),
                   std::numeric_limits<double>::quiet_NaN());
  profile.defined.assign(static_cast<std::size_t>(n_bins), 0);
  double fmin = std::numeric_limits<double>::infinity();
  for (int b = 0; b < n_bins; ++b) {
    if (mass[static_cast<std::size_t>(b)] <= 0.0) continue;
    const double f = -std::log(mass[static_cast<std::size_t>(b)]);
    profile.f[static_cast<std::size_t>(b)] = f;
    profile.defined[static_cast<std::size_t>(b)] = 1;
    fmin = std::min(fmin, f);
  }
  if (!std::isfinite(fmin)) {
    throw numeric_error("free_energy_projection: no bin carries weight mass");
  }
  for (int b = 0; b < n_bins; ++b) {
    if (profile.defined[static_cast<std::size_t>(b)]) {
      profile.f[static_cast<std::size_t>(b)] -= fmin;
    }
  }
  return profile;
}

Matrix ramachandran_hist(const std::vector<double>& phi, const std::vector<double>& psi,
                         const std::vector<double>& log_weights, int n_bins) {
  if (n_bins < 1) throw contract_error("ramachandran_hist: n_bins must be >= 1");
  if (phi.size() != psi.size()) {
    throw contract_error("ramachandran_hist: phi and psi lengths differ");
  }
  const std::vector<double> w = resolve_weights(phi.size(), log_weights, "ramachandran_hist");
  Matrix h(n_bins, n_bins);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    h(periodic_bin(phi[i], n_bins), periodic_bin(psi[i], n_bins)) += w[i];
  }
  return h;
}

}  // namespace tbg::analysis
