//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/reweight/weights.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tbg/errors.hpp"

namespace tbg::reweight {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Largest usable log-weight, or -inf when nothing has support. Rejects NaN
// and +inf, which would silently corrupt every downstream sum.
double checked_max(const std::vector<double>& log_weights) {
  if (log_weights.empty()) throw contract_error("reweight: empty log-weight array");
  double m = kNegInf;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double lw = log_weights[i];
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw numeric_error("reweight: log-weight " + std::to_string(i) +
                          " is NaN or +inf");
    }
    m = std::max(m, lw);
  }
  return m;
}

}  // namespace

void WeightedEnsemble::validate_shape() const {
  const std::size_t n = model_logprob.size();
  if (energy.size() != n || valid.size() != n) {
    throw contract_error("ensemble: model_logprob/energy/valid lengths disagree");
  }
  if (!samples.empty() && samples.size() != n) {
    throw contract_error("ensemble: samples length disagrees with the metadata arrays");
  }
  if (!log_weight.empty() && log_weight.size() != n) {
    throw contract_error("ensemble: log_weight length disagrees with the metadata arrays");
  }
}

void compute_weights(WeightedEnsemble& e) {
  e.validate_shape();
  if (e.size() == 0) throw contract_error("compute_weights: empty ensemble");
  e.log_weight.assign(e.size(), kNegInf);
  bool any_support = false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e.valid[i]) continue;
    const double u = e.energy[i];
    const double lp = e.model_logprob[i];
    if (std::isnan(u) || std::isnan(lp)) {
      throw numeric_error("compute_weights: NaN energy or log-prob at sample " +
                          std::to_string(i));
    }
    const double lw = -u - lp;  // -inf when the energy saturates; that is fine
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw numeric_error("compute_weights: unusable log-weight at sample " +
                          std::to_string(i));
    }
    e.log_weight[i] = lw;
    if (lw > kNegInf) any_support = true;
  }
  if (!any_support) {
    throw numeric_error("compute_weights: no valid sample has support");
  }
}

std::vector<double> normalized_weights(const std::vector<double>& log_weights) {
  const double m = checked_max(log_weights);
  if (m == kNegInf) throw numeric_error("normalized_weights: no finite log-weight");
  std::vector<double> w(log_weights.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - m);
    sum += w[i];
  }
  for (double& wi : w) wi /= sum;
  return w;
}

double kish_ess(const std::vector<double>& log_weights) {
  const double m = checked_max(log_weights);
  if (m == kNegInf) throw numeric_error("kish_ess: no finite log-weight");
  double sum = 0.0, sum_sq = 0.0;
  for (double lw : log_weights) {
    const double w = std::exp(lw - m);
    sum += w;
    sum_sq += w * w;
  }
  return (sum * sum) / (static_cast<double>(log_weights.size()) * sum_sq);
}

double weighted_observable(const WeightedEnsemble& e, const std::vector<double>& obs_values) {
  e.validate_shape();
  if (e.log_weight.size() != e.size()) {
    throw contract_error("weighted_observable: call compute_weights first");
  }
  if (obs_values.size() != e.size()) {
    throw contract_error("weighted_observable: observable array length mismatch");
  }
  const double m = checked_max(e.log_weight);
  if (m == kNegInf) throw numeric_error("weighted_observable: no finite log-weight");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double w = std::exp(e.log_weight[i] - m);
    if (w == 0.0) continue;
    if (std::isnan(obs_values[i])) {
      throw numeric_error("weighted_observable: NaN observable at supported sample " +
                          std::to_string(i));
    }
    num += w * obs_values[i];
    den += w;
  }
  return num / den;
}

double weighted_observable(const WeightedEnsemble& e,
                           const std::function<double(const std::vector<double>&)>& obs) {
  if (e.samples.size() != e.size()) {
    throw contract_error("weighted_observable: ensemble carries no sample coordinates");
  }
  std::vector<double> values(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) values[i] = obs(e.samples[i]);
  return weighted_observable(e, values);
}

}  // namespace tbg::reweight
