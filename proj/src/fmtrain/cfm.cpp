//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/fmtrain/cfm.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "tbg/cnf/prior.hpp"
#include "tbg/errors.hpp"
#include "tbg/numcore/tape.hpp"

namespace tbg::fmtrain {
namespace {

void check_item(const FlowMatchItem& item, int dim, std::size_t index) {
  const std::string tag = "cfm: item " + std::to_string(index);
  if (item.x0.size() != item.x1.size() || item.x0.empty()) {
    throw contract_error(tag + ": x0/x1 size mismatch");
  }
  if (item.x0.size() % static_cast<std::size_t>(dim) != 0) {
    throw contract_error(tag + ": state size not a multiple of dim");
  }
  if (!(item.t >= 0.0 && item.t <= 1.0)) {
    throw contract_error(tag + ": t outside [0,1]");
  }
  if (!item.xt.empty() && item.xt.size() != item.x0.size()) {
    throw contract_error(tag + ": xt size mismatch");
  }
}

numcore::Matrix as_matrix(const std::vector<double>& flat, int dim) {
  return numcore::Matrix::from(static_cast<int>(flat.size()) / dim, dim,
                               std::vector<double>(flat.begin(), flat.end()));
}

const numcore::Matrix& embedding_for(const std::vector<numcore::Matrix>& embeddings,
                                     const FlowMatchItem& item, std::size_t index) {
  if (item.molecule_id < 0 ||
      static_cast<std::size_t>(item.molecule_id) >= embeddings.size()) {
    throw contract_error("cfm: item " + std::to_string(index) +
                         " references unknown molecule id " +
                         std::to_string(item.molecule_id));
  }
  return embeddings[static_cast<std::size_t>(item.molecule_id)];
}

}  // namespace

std::vector<double> sample_conditional(const std::vector<double>& x0,
                                       const std::vector<double>& x1, double t, double sigma,
                                       int dim, numcore::Rng& rng) {
  if (x0.size() != x1.size() || x0.empty()) {
    throw contract_error("sample_conditional: x0/x1 size mismatch");
  }
  if (!(t >= 0.0 && t <= 1.0)) throw contract_error("sample_conditional: t outside [0,1]");
  if (!(sigma >= 0.0)) throw contract_error("sample_conditional: sigma must be >= 0");

  std::vector<double> xt(x0.size());
  for (std::size_t i = 0; i < xt.size(); ++i) xt[i] = t * x1[i] + (1.0 - t) * x0[i];
  if (sigma > 0.0) {
    std::vector<double> noise(x0.size());
    for (double& v : noise) v = rng.normal();
    cnf::project_mean_free(noise, dim);
    for (std::size_t i = 0; i < xt.size(); ++i) xt[i] += sigma * noise[i];
  }
  return xt;
}

double cfm_loss(const FlowMatchBatch& batch, const ItemVelocity& velocity, int dim) {
  if (batch.empty()) throw contract_error("cfm_loss: empty batch");
  if (dim < 1) throw contract_error("cfm_loss: dim must be >= 1");
  double total = 0.0;
  std::vector<double> v;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const FlowMatchItem& item = batch[i];
    check_item(item, dim, i);
    v.assign(item.x0.size(), 0.0);
    velocity(item, v.data());
    double sq = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double d = v[k] - (item.x1[k] - item.x0[k]);
      sq += d * d;
    }
    const double contribution = item.bias_weight * sq / item.n_atoms(dim);
    if (!std::isfinite(contribution)) {
      throw numeric_error("cfm_loss: non-finite contribution from item " + std::to_string(i));
    }
    total += contribution;
  }
  return total / static_cast<double>(batch.size());
}

double cfm_loss_egnn(const vecfield::EgnnConfig& cfg, const numcore::ParamVector& params,
                     const FlowMatchBatch& batch,
                     const std::vector<numcore::Matrix>& embeddings, int dim) {
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].xt.size() != batch[i].x0.size()) {
      throw contract_error("cfm_loss_egnn: item " + std::to_string(i) + " has no interpolant");
    }
  }
  return cfm_loss(
      batch,
      [&](const FlowMatchItem& item, double* v) {
        const numcore::Matrix& emb = embedding_for(embeddings, item, 0);
        const std::vector<double> vel =
            vecfield::egnn_forward(cfg, params, item.t, item.xt, emb, dim);
        for (std::size_t k = 0; k < vel.size(); ++k) v[k] = vel[k];
      },
      dim);
}

double cfm_loss_egnn_grad(const vecfield::EgnnConfig& cfg, const numcore::ParamVector& params,
                          const FlowMatchBatch& batch,
                          const std::vector<numcore::Matrix>& embeddings, int dim,
                          std::vector<double>& grad) {
  if (batch.empty()) throw contract_error("cfm_loss_egnn_grad: empty batch");
  if (dim < 1) throw contract_error("cfm_loss_egnn_grad: dim must be >= 1");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    check_item(batch[i], dim, i);
    if (batch[i].xt.size() != batch[i].x0.size()) {
      throw contract_error("cfm_loss_egnn_grad: item " + std::to_string(i) +
                           " has no interpolant");
    }
    embedding_for(embeddings, batch[i], i);  // validate ids before recording
  }

  numcore::RecordedFn fn = [&](numcore::Tape& tape,
                               const std::vector<numcore::Tape::NodeId>& leaves) {
    numcore::Tape::NodeId total = -1;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const FlowMatchItem& item = batch[i];
      const numcore::Matrix& emb = embeddings[static_cast<std::size_t>(item.molecule_id)];
      const numcore::Tape::NodeId xt_node = tape.constant(as_matrix(item.xt, dim));
      const numcore::Tape::NodeId v =
          vecfield::egnn_forward_tape(tape, cfg, leaves, item.t, xt_node, emb);
      std::vector<double> target(item.x0.size());
      for (std::size_t k = 0; k < target.size(); ++k) target[k] = item.x1[k] - item.x0[k];
      const numcore::Tape::NodeId diff = tape.sub(v, tape.constant(as_matrix(target, dim)));
      const double coef =
          item.bias_weight / (static_cast<double>(item.n_atoms(dim)) *
                              static_cast<double>(batch.size()));
      const numcore::Tape::NodeId term = tape.scale(tape.sqnorm(diff), coef);
      total = (total < 0) ? term : tape.add(total, term);
    }
    return total;
  };

  double value = 0.0;
  grad = numcore::grad(fn, params, &value);
  return value;
}

}  // namespace tbg::fmtrain
