//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_TARGETS_GMM_HPP
#define TBG_TARGETS_GMM_HPP

#include <string>
#include <vector>

#include "tbg/numcore/rng.hpp"
#include "tbg/targets/target.hpp"

namespace tbg::targets {

// Gaussian mixture with exact, normalized log-density: U(x) = -log p(x).
class GmmTarget : public BoltzmannTarget {
 public:
  // means: K rows of dimension D; covs: K row-major D*D SPD matrices;
  // weights: K positive entries summing to 1 (within 1e-12).
  GmmTarget(std::vector<std::vector<double>> means,
            std::vector<std::vector<double>> covs, std::vector<double> weights);

  std::string name() const override { return "gmm"; }
  int dim() const override { return dim_; }
  double energy(const double* x) const override;
  void gradient(const double* x, double* g) const override;

  int n_components() const { return static_cast<int>(weights_.size()); }
  double log_density(const double* x) const;
  // Per-component posterior responsibilities at x.
  std::vector<double> responsibilities(const double* x) const;
  // Exact draw; if component_out is non-null it receives the component index.
  void sample(numcore::Rng& rng, double* x, int* component_out = nullptr) const;
  const std::vector<double>& mean(int k) const { return means_[static_cast<size_t>(k)]; }
  double weight(int k) const { return weights_[static_cast<size_t>(k)]; }

 private:
  int dim_ = 0;
  std::vector<std::vector<double>> means_;
  std::vector<std::vector<double>> chol_;     // lower Cholesky factors, row-major
  std::vector<double> log_norm_;              // log w_k - D/2 log 2pi - 1/2 log|S_k|
  std::vector<double> weights_;
  std::vector<double> cum_weights_;

  // log N(x; mu_k, S_k) + log w_k, and optionally S_k^{-1}(x - mu_k).
  double component_logp(int k, const double* x, double* prec_dx) const;
};

}  // namespace tbg::targets

#endif  // TBG_TARGETS_GMM_HPP
