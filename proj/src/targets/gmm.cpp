//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/targets/gmm.hpp"

#include <algorithm>
#include <cmath>

namespace tbg::targets {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

// In-place lower Cholesky of a row-major d x d SPD matrix.
void cholesky(std::vector<double>& a, int d) {
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<size_t>(i * d + j)];
      for (int k = 0; k < j; ++k)
        s -= a[static_cast<size_t>(i * d + k)] * a[static_cast<size_t>(j * d + k)];
      if (i == j) {
        if (s <= 0.0) throw contract_error("GmmTarget: covariance not positive definite");
        a[static_cast<size_t>(i * d + j)] = std::sqrt(s);
      } else {
        a[static_cast<size_t>(i * d + j)] = s / a[static_cast<size_t>(j * d + j)];
      }
    }
    for (int j = i + 1; j < d; ++j) a[static_cast<size_t>(i * d + j)] = 0.0;
  }
}
}  // namespace

GmmTarget::GmmTarget(std::vector<std::vector<double>> means,
                     std::vector<std::vector<double>> covs,
                     std::vector<double> weights)
    : means_(std::move(means)), weights_(std::move(weights)) {
  const size_t k = means_.size();
  if (k == 0 || covs.size() != k || weights_.size() != k)
    throw contract_error("GmmTarget: component count mismatch");
  dim_ = static_cast<int>(means_[0].size());
  if (dim_ == 0) throw contract_error("GmmTarget: zero dimension");
  double wsum = 0.0;
  for (double w : weights_) {
    if (w <= 0.0) throw contract_error("GmmTarget: weights must be positive");
    wsum += w;
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw contract_error("GmmTarget: weights must sum to 1");

  chol_.resize(k);
  log_norm_.resize(k);
  cum_weights_.resize(k);
  double acc = 0.0;
  for (size_t c = 0; c < k; ++c) {
    if (means_[c].size() != static_cast<size_t>(dim_) ||
        covs[c].size() != static_cast<size_t>(dim_ * dim_))
      throw contract_error("GmmTarget: component dimension mismatch");
    chol_[c] = covs[c];
    cholesky(chol_[c], dim_);
    double logdet = 0.0;
    for (int i = 0; i < dim_; ++i)
      logdet += 2.0 * std::log(chol_[c][static_cast<size_t>(i * dim_ + i)]);
    log_norm_[c] = std::log(weights_[c]) - 0.5 * dim_ * kLog2Pi - 0.5 * logdet;
    acc += weights_[c];
    cum_weights_[c] = acc;
  }
  cum_weights_.back() = 1.0;
}

double GmmTarget::component_logp(int k, const double* x, double* prec_dx) const {
  const int d = dim_;
  const auto& L = chol_[static_cast<size_t>(k)];
  const auto& mu = means_[static_cast<size_t>(k)];
  // Forward solve L y = (x - mu).
  std::vector<double> y(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    double s = x[i] - mu[static_cast<size_t>(i)];
    for (int j = 0; j < i; ++j) s -= L[static_cast<size_t>(i * d + j)] * y[static_cast<size_t>(j)];
    y[static_cast<size_t>(i)] = s / L[static_cast<size_t>(i * d + i)];
  }
  double q = 0.0;
  for (int i = 0; i < d; ++i) q += y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
  if (prec_dx) {
    // Back solve L^T z = y, giving S^{-1}(x - mu).
    for (int i = d - 1; i >= 0; --i) {
      double s = y[static_cast<size_t>(i)];
      for (int j = i + 1; j < d; ++j) s -= L[static_cast<size_t>(j * d + i)] * prec_dx[j];
      prec_dx[i] = s / L[static_cast<size_t>(i * d + i)];
    }
  }
  return log_norm_[static_cast<size_t>(k)] - 0.5 * q;
}

double GmmTarget::log_density(const double* x) const {
  const int k = n_components();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> lp(static_cast<size_t>(k));
  for (int c = 0; c < k; ++c) {
    lp[static_cast<size_t>(c)] = component_logp(c, x, nullptr);
    best = std::max(best, lp[static_cast<size_t>(c)]);
  }
  if (!std::isfinite(best)) return best;
  double s = 0.0;
  for (int c = 0; c < k; ++c) s += std::exp(lp[static_cast<size_t>(c)] - best);
  return best + std::log(s);
}

std::vector<double> GmmTarget::responsibilities(const double* x) const {
  const int k = n_components();
  std::vector<double> lp(static_cast<size_t>(k));
  double best = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < k; ++c) {
    lp[static_cast<size_t>(c)] = component_logp(c, x, nullptr);
    best = std::max(best, lp[static_cast<size_t>(c)]);
  }
  double s = 0.0;
  for (int c = 0; c < k; ++c) {
    lp[static_cast<size_t>(c)] = std::exp(lp[static_cast<size_t>(c)] - best);
    s += lp[static_cast<size_t>(c)];
  }
  for (double& v : lp) v /= s;
  return lp;
}

double GmmTarget::energy(const double* x) const {
  return sanitize_energy(-log_density(x), 1e6);
}

void GmmTarget::gradient(const double* x, double* g) const {
  const int k = n_components();
  const int d = dim_;
  std::vector<double> r = responsibilities(x);
  std::vector<double> prec_dx(static_cast<size_t>(d));
  std::fill(g, g + d, 0.0);
  // grad U = sum_k r_k * S_k^{-1} (x - mu_k)
  for (int c = 0; c < k; ++c) {
    component_logp(c, x, prec_dx.data());
    for (int i = 0; i < d; ++i) g[i] += r[static_cast<size_t>(c)] * prec_dx[static_cast<size_t>(i)];
  }
}

void GmmTarget::sample(numcore::Rng& rng, double* x, int* component_out) const {
  const double u = rng.uniform();
  int c = 0;
  while (c + 1 < n_components() && u > cum_weights_[static_cast<size_t>(c)]) ++c;
  if (component_out) *component_out = c;
  const int d = dim_;
  std::vector<double> z(static_cast<size_t>(d));
  for (double& v : z) v = rng.normal();
  const auto& L = chol_[static_cast<size_t>(c)];
  const auto& mu = means_[static_cast<size_t>(c)];
  for (int i = 0; i < d; ++i) {
    double s = mu[static_cast<size_t>(i)];
    for (int j = 0; j <= i; ++j) s += L[static_cast<size_t>(i * d + j)] * z[static_cast<size_t>(j)];
    x[i] = s;
  }
}

}  // namespace tbg::targets
