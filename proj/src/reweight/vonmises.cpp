//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/reweight/vonmises.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "tbg/errors.hpp"

namespace tbg::reweight {
namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kSeriesCutoff = 15.0;

// Power series sum_k (x^2/4)^k / (k!)^2; every term is positive so the sum
// is stable, and at the cutoff ~45 terms reach full precision.
double i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Asymptotic correction sum_k prod_j (2j-1)^2 / (k! (8x)^k); for x above the
// cutoff the terms fall below 1e-16 long before the series turns divergent.
double i0_asymptotic_correction(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd / (8.0 * x * static_cast<double>(k));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

double bessel_i0(double x) {
  x = std::fabs(x);  // even function
  if (x <= kSeriesCutoff) return i0_series(x);
  return std::exp(x) * i0_asymptotic_correction(x) / std::sqrt(2.0 * kPi * x);
}

double log_bessel_i0(double x) {
  x = std::fabs(x);
  if (x <= kSeriesCutoff) return std::log(i0_series(x));
  return x + std::log(i0_asymptotic_correction(x)) - 0.5 * std::log(2.0 * kPi * x);
}

double vonmises_pdf(double phi, double mu, double kappa) {
  if (!(kappa >= 0.0)) throw contract_error("vonmises_pdf: kappa must be >= 0");
  const double log_pdf =
      kappa * std::cos(phi - mu) - std::log(2.0 * kPi) - log_bessel_i0(kappa);
  return std::exp(log_pdf);
}

std::vector<double> vonmises_bias_weights(const std::vector<double>& phi, double mu,
                                          double kappa, double* r_out) {
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] > -kPi - 1e-12 && phi[i] <= kPi + 1e-12)) {
      throw contract_error("vonmises_bias_weights: angle " + std::to_string(i) +
                           " outside (-pi, pi]");
    }
  }
  std::size_t n_pos = 0, n_neg = 0;
  double f_pos_sum = 0.0;
  std::vector<double> f(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    f[i] = vonmises_pdf(phi[i], mu, kappa);
    if (phi[i] >= 0.0) {
      ++n_pos;
      f_pos_sum += f[i];
    } else {
      ++n_neg;
    }
  }

  if (n_pos == 0) {  // r undefined; fall back to unbiased weights
    if (r_out != nullptr) *r_out = 0.0;
    return std::vector<double>(phi.size(), 1.0);
  }
  const double r =
      std::max(0.0, (static_cast<double>(n_neg) - static_cast<double>(n_pos)) / f_pos_sum);
  if (r_out != nullptr) *r_out = r;

  std::vector<double> w(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) w[i] = r * f[i] + 1.0;
  return w;
}

}  // namespace tbg::reweight
