//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/cnf/prior.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "tbg/errors.hpp"

namespace tbg::cnf {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMeanTolerance = 1e-9;

void check_state_size(const MeanFreePrior& prior, std::size_t got) {
  const std::size_t want =
      static_cast<std::size_t>(prior.n_atoms) * static_cast<std::size_t>(prior.dim);
  if (got != want) {
    throw contract_error("prior: state has " + std::to_string(got) + " entries, expected " +
                         std::to_string(want));
  }
}

}  // namespace

void MeanFreePrior::validate() const {
  if (n_atoms < 2) throw config_error("prior: n_atoms must be >= 2");
  if (dim < 1) throw config_error("prior: dim must be >= 1");
}

double project_mean_free(std::vector<double>& x, int dim) {
  if (dim < 1) throw contract_error("project_mean_free: dim must be >= 1");
  if (x.empty() || x.size() % static_cast<std::size_t>(dim) != 0) {
    throw contract_error("project_mean_free: state size not a multiple of dim");
  }
  const std::size_t n = x.size() / static_cast<std::size_t>(dim);
  double shift_sq = 0.0;
  for (int a = 0; a < dim; ++a) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i * dim + a];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x[i * dim + a] -= mean;
    shift_sq += static_cast<double>(n) * mean * mean;
  }
  return std::sqrt(shift_sq);
}

double mean_free_defect(const std::vector<double>& x, int dim) {
  if (dim < 1) throw contract_error("mean_free_defect: dim must be >= 1");
  if (x.empty() || x.size() % static_cast<std::size_t>(dim) != 0) {
    throw contract_error("mean_free_defect: state size not a multiple of dim");
  }
  const std::size_t n = x.size() / static_cast<std::size_t>(dim);
  double worst = 0.0;
  for (int a = 0; a < dim; ++a) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i * dim + a];
    mean /= static_cast<double>(n);
    worst = std::max(worst, std::fabs(mean));
  }
  return worst;
}

std::vector<double> prior_sample(const MeanFreePrior& prior, numcore::Rng& rng) {
  prior.validate();
  std::vector<double> x(static_cast<std::size_t>(prior.n_atoms) *
                        static_cast<std::size_t>(prior.dim));
  for (double& v : x) v = rng.normal();
  project_mean_free(x, prior.dim);
  return x;
}

std::vector<std::vector<double>> prior_samples(const MeanFreePrior& prior, long count,
                                               std::uint64_t seed) {
  prior.validate();
  if (count < 0) throw contract_error("prior_samples: count must be >= 0");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    numcore::Rng rng = numcore::Rng::stream(seed, static_cast<std::uint64_t>(i));
    out.push_back(prior_sample(prior, rng));
  }
  return out;
}

double prior_logprob(const MeanFreePrior& prior, const std::vector<double>& x) {
  prior.validate();
  check_state_size(prior, x.size());
  const double defect = mean_free_defect(x, prior.dim);
  if (defect > kMeanTolerance) {
    throw contract_error("prior_logprob: state mean magnitude " + std::to_string(defect) +
                         " exceeds tolerance 1e-9; project it first");
  }
  std::vector<double> centered = x;
  project_mean_free(centered, prior.dim);
  double sq = 0.0;
  for (double v : centered) sq += v * v;
  return -0.5 * sq - 0.5 * static_cast<double>(prior.effective_dim()) * std::log(kTwoPi);
}

}  // namespace tbg::cnf
