//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/fmtrain/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#include "tbg/cnf/prior.hpp"
#include "tbg/errors.hpp"
#include "tbg/numcore/rng.hpp"

namespace tbg::fmtrain {
namespace {

constexpr double kFrameMeanTolerance = 1e-6;

void validate_set(const TrainSet& set, const TrainingConfig& cfg) {
  if (set.molecules.empty()) throw contract_error("train: empty training set");
  if (set.dim < 1) throw contract_error("train: dim must be >= 1");
  for (const TrainMolecule& mol : set.molecules) {
    const std::string tag = "train: molecule '" + mol.name + "'";
    if (mol.frames.empty()) throw contract_error(tag + " has no frames");
    if (mol.embedding.rows() < 2) throw contract_error(tag + " needs at least two atoms");
    if (mol.embedding.cols() != cfg.model.n_embedding) {
      throw contract_error(tag + " embedding width " + std::to_string(mol.embedding.cols()) +
                           " does not match the model's " +
                           std::to_string(cfg.model.n_embedding));
    }
    const std::size_t want =
        static_cast<std::size_t>(mol.embedding.rows()) * static_cast<std::size_t>(set.dim);
    for (const auto& frame : mol.frames) {
      if (frame.size() != want) {
        throw contract_error(tag + " has a frame of size " + std::to_string(frame.size()) +
                             ", expected " + std::to_string(want));
      }
      if (cnf::mean_free_defect(frame, set.dim) > kFrameMeanTolerance) {
        throw contract_error(tag + " has a frame that is not mean-free");
      }
    }
    if (!mol.frame_bias.empty() && mol.frame_bias.size() != mol.frames.size()) {
      throw contract_error(tag + " bias array length does not match its frame count");
    }
  }
}

// Stage index for a zero-based global step.
int stage_of(const TrainingConfig& cfg, int step) {
  int upto = 0;
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    upto += cfg.stages[s].steps;
    if (step < upto) return static_cast<int>(s);
  }
  return static_cast<int>(cfg.stages.size()) - 1;
}

std::string format_log_line(int step, int stage, double lr, double loss) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "step=%d stage=%d lr=%.9g loss=%.12g", step, stage, lr, loss);
  return std::string(buf);
}

}  // namespace

int TrainingConfig::total_steps() const {
  int total = 0;
  for (const LrStage& s : stages) total += s.steps;
  return total;
}

void TrainingConfig::validate() const {
  model.validate();
  if (stages.empty()) throw config_error("train: at least one learning-rate stage required");
  for (const LrStage& s : stages) {
    if (!(s.lr > 0.0)) throw config_error("train: stage learning rate must be > 0");
    if (s.steps < 1) throw config_error("train: stage step count must be >= 1");
  }
  if (samples_per_molecule < 1) throw config_error("train: samples_per_molecule must be >= 1");
  if (!(sigma >= 0.0)) throw config_error("train: sigma must be >= 0");
  if (checkpoint_every < 0) throw config_error("train: checkpoint_every must be >= 0");
}

FlowMatchBatch assemble_batch(const TrainSet& set, const TrainingConfig& cfg, int step) {
  numcore::Rng rng = numcore::Rng::stream(cfg.seed, static_cast<std::uint64_t>(step));
  FlowMatchBatch batch;
  batch.reserve(set.molecules.size() * static_cast<std::size_t>(cfg.samples_per_molecule));
  for (std::size_t m = 0; m < set.molecules.size(); ++m) {
    const TrainMolecule& mol = set.molecules[m];
    const cnf::MeanFreePrior prior{mol.embedding.rows(), set.dim};
    for (int k = 0; k < cfg.samples_per_molecule; ++k) {
      FlowMatchItem item;
      item.molecule_id = static_cast<int>(m);
      const std::size_t frame = rng.below(mol.frames.size());
      item.x1 = mol.frames[frame];
      item.bias_weight = mol.frame_bias.empty() ? 1.0 : mol.frame_bias[frame];
      item.x0 = cnf::prior_sample(prior, rng);
      item.t = rng.uniform();
      item.xt = sample_conditional(item.x0, item.x1, item.t, cfg.sigma, set.dim, rng);
      batch.push_back(std::move(item));
    }
  }
  return batch;
}

TrainResult train(const TrainSet& set, const TrainingConfig& cfg) {
  TrainerState fresh;
  fresh.step = 0;
  fresh.params = vecfield::init_egnn_params(cfg.model, cfg.seed);
  fresh.adam = numcore::AdamState::zeros(fresh.params.size());
  return train(set, cfg, fresh);
}

TrainResult train(const TrainSet& set, const TrainingConfig& cfg, const TrainerState& state) {
  cfg.validate();
  validate_set(set, cfg);
  const int total = cfg.total_steps();
  if (state.step < 0 || state.step > total) {
    throw contract_error("train: resume step " + std::to_string(state.step) +
                         " outside [0, " + std::to_string(total) + "]");
  }
  {
    const numcore::ParamVector reference = vecfield::init_egnn_params(cfg.model, cfg.seed);
    if (!state.params.same_layout(reference)) {
      throw contract_error("train: resume parameters do not match the model layout");
    }
  }
  if (state.adam.m.size() != state.params.size() ||
      state.adam.v.size() != state.params.size()) {
    throw contract_error("train: resume optimizer state size mismatch");
  }

  std::vector<numcore::Matrix> embeddings;
  embeddings.reserve(set.molecules.size());
  for (const TrainMolecule& mol : set.molecules) embeddings.push_back(mol.embedding);

  TrainResult res;
  res.params = state.params;
  numcore::AdamState adam = state.adam;
  std::vector<double> grad;

  const auto t_start = std::chrono::steady_clock::now();
  for (int step = state.step; step < total; ++step) {
    const int stage = stage_of(cfg, step);
    const double lr = cfg.stages[static_cast<std::size_t>(stage)].lr;
    const FlowMatchBatch batch = assemble_batch(set, cfg, step);
    const double loss = cfm_loss_egnn_grad(cfg.model, res.params, batch, embeddings, set.dim, grad);
    numcore::adam_step(res.params, grad, adam, lr, cfg.adam);
    res.loss_history.push_back(loss);
    res.log_lines.push_back(format_log_line(step, stage, lr, loss));
    if (cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0 &&
        step + 1 < total) {
      res.snapshots.push_back(TrainerState{step + 1, res.params, adam});
    }
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  res.final_state = TrainerState{total, res.params, std::move(adam)};
  return res;
}

}  // namespace tbg::fmtrain
