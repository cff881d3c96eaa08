//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/analysis/tica.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tbg/errors.hpp"
#include "tbg/numcore/eig.hpp"

namespace tbg::analysis {

using numcore::Matrix;

Matrix sincos_features(const Matrix& angles) {
  Matrix out(angles.rows(), 2 * angles.cols());
  for (int t = 0; t < angles.rows(); ++t) {
    for (int d = 0; d < angles.cols(); ++d) {
      out(t, 2 * d) = std::sin(angles(t, d));
      out(t, 2 * d + 1) = std::cos(angles(t, d));
    }
  }
  return out;
}

namespace {

constexpr double kRidgeScale = 1e-8;

// Rank-one accumulation c += scale * (x - mu) (y - mu)^T for row vectors taken
// from the feature matrix.
void accumulate_outer(const Matrix& f, int row_x, int row_y, const std::vector<double>& mu,
                      double scale, Matrix& c) {
  const int dim = f.cols();
  for (int i = 0; i < dim; ++i) {
    const double xi = scale * (f(row_x, i) - mu[i]);
    if (xi == 0.0) continue;
    for (int j = 0; j < dim; ++j) c(i, j) += xi * (f(row_y, j) - mu[j]);
  }
}

}  // namespace

TicaModel tica_fit(const Matrix& features, int lag, const std::vector<double>& frame_weights,
                   std::string feature_definition) {
  const int frames = features.rows();
  const int dim = features.cols();
  if (lag < 1) throw contract_error("tica_fit: lag must be >= 1");
  if (frames <= lag) throw contract_error("tica_fit: trajectory must be longer than the lag");
  if (dim < 1) throw contract_error("tica_fit: no feature columns");
  if (!features.all_finite()) throw numeric_error("tica_fit: non-finite feature value");
  if (!frame_weights.empty() && frame_weights.size() != static_cast<std::size_t>(frames)) {
    throw contract_error("tica_fit: frame_weights length does not match the frame count");
  }
  const auto weight_of = [&](int t) {
    return frame_weights.empty() ? 1.0 : frame_weights[static_cast<std::size_t>(t)];
  };
  for (int t = 0; t < frames; ++t) {
    const double w = weight_of(t);
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw contract_error("tica_fit: frame weight " + std::to_string(t) +
                           " is negative or non-finite");
    }
  }

  TicaModel model;
  model.lag = lag;
  model.feature_definition = std::move(feature_definition);

  // Weighted mean over all frames; the transform is centered against this.
  model.feature_mean.assign(static_cast<std::size_t>(dim), 0.0);
  double total_weight = 0.0;
  for (int t = 0; t < frames; ++t) {
    const double w = weight_of(t);
    total_weight += w;
    for (int i = 0; i < dim; ++i) model.feature_mean[static_cast<std::size_t>(i)] += w * features(t, i);
  }
  if (total_weight <= 0.0) throw numeric_error("tica_fit: total frame weight is zero");
  for (double& m : model.feature_mean) m /= total_weight;

  // Symmetrized pair-ensemble covariances about the all-frame mean.
  Matrix c0(dim, dim), ct(dim, dim);
  double pair_weight = 0.0;
  for (int t = 0; t + lag < frames; ++t) pair_weight += weight_of(t);
  if (pair_weight <= 0.0) throw numeric_error("tica_fit: lagged pairs carry zero weight");
  for (int t = 0; t + lag < frames; ++t) {
    const double s = weight_of(t) / (2.0 * pair_weight);
    if (s == 0.0) continue;
    accumulate_outer(features, t, t, model.feature_mean, s, c0);
    accumulate_outer(features, t + lag, t + lag, model.feature_mean, s, c0);
    accumulate_outer(features, t, t + lag, model.feature_mean, s, ct);
    accumulate_outer(features, t + lag, t, model.feature_mean, s, ct);
  }

  double trace = 0.0;
  for (int i = 0; i < dim; ++i) trace += c0(i, i);
  const double ridge = kRidgeScale * trace / dim;
  for (int i = 0; i < dim; ++i) c0(i, i) += ridge;

  numcore::SymEigResult eig;
  try {
    eig = numcore::sym_eig(ct, c0);
  } catch (const numeric_error&) {
    throw numeric_error(
        "tica_fit: instantaneous covariance is rank-deficient beyond the ridge");
  }
  model.eigenvalues = std::move(eig.eigenvalues);
  model.eigenvectors = std::move(eig.eigenvectors);
  return model;
}

Matrix tica_transform(const TicaModel& model, const Matrix& features) {
  const int dim = static_cast<int>(model.feature_mean.size());
  if (features.cols() != dim) {
    throw contract_error("tica_transform: feature width does not match the fitted model");
  }
  if (model.eigenvectors.rows() != dim) {
    throw contract_error("tica_transform: model eigenvectors are missing or malformed");
  }
  const int comps = model.eigenvectors.cols();
  Matrix out(features.rows(), comps);
  for (int t = 0; t < features.rows(); ++t) {
    for (int k = 0; k < comps; ++k) {
      double acc = 0.0;
      for (int i = 0; i < dim; ++i) {
        acc += (features(t, i) - model.feature_mean[static_cast<std::size_t>(i)]) *
               model.eigenvectors(i, k);
      }
      out(t, k) = acc;
    }
  }
  return out;
}

}  // namespace tbg::analysis
