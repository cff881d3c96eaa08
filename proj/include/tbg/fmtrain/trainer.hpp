//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_FMTRAIN_TRAINER_HPP
#define TBG_FMTRAIN_TRAINER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tbg/fmtrain/cfm.hpp"
#include "tbg/numcore/adam.hpp"
#include "tbg/numcore/matrix.hpp"
#include "tbg/numcore/params.hpp"
#include "tbg/vecfield/egnn.hpp"

namespace tbg::fmtrain {

// One molecule's training data: its atom embedding and mean-free frames.
// frame_bias, when non-empty, carries one multiplicative loss weight per
// frame (e.g. the torsion biasing weights).
struct TrainMolecule {
  std::string name;
  numcore::Matrix embedding;
  std::vector<std::vector<double>> frames;
  std::vector<double> frame_bias;
};

struct TrainSet {
  std::vector<TrainMolecule> molecules;
  int dim = 3;
};

struct LrStage {
  double lr = 1e-3;
  int steps = 1;
};

struct TrainingConfig {
  vecfield::EgnnConfig model;
  std::vector<LrStage> stages;     // consumed in order
  int samples_per_molecule = 3;    // batch items contributed by each molecule
  double sigma = 0.01;             // conditional-path noise scale
  std::uint64_t seed = 0;
  int checkpoint_every = 0;        // snapshot cadence in steps; 0 = final only
  numcore::AdamOptions adam;

  int total_steps() const;
  void validate() const;  // throws config_error
};

// Complete optimizer state; restoring it and re-running reproduces the
// uninterrupted run bit for bit, because every step draws from a counter
// stream keyed by (seed, step) rather than from mutable generator state.
struct TrainerState {
  int step = 0;  // completed steps
  numcore::ParamVector params;
  numcore::AdamState adam;
};

struct TrainResult {
  numcore::ParamVector params;
  TrainerState final_state;
  std::vector<double> loss_history;     // one entry per step
  std::vector<std::string> log_lines;   // "step=... stage=... lr=... loss=..."
  std::vector<TrainerState> snapshots;  // at checkpoint_every cadence
  double wall_seconds = 0.0;            // aggregate; not part of the log
};

// Deterministic batch assembly for one step: samples_per_molecule items per
// molecule in molecule order, each with a uniformly drawn frame, a fresh
// prior draw, t ~ U[0,1], and the noisy interpolant. Exposed for tests and
// for reproducing a training batch offline.
FlowMatchBatch assemble_batch(const TrainSet& set, const TrainingConfig& cfg, int step);

// Staged-Adam conditional flow matching over the whole set. The overload
// with a TrainerState resumes after `state.step` completed steps.
TrainResult train(const TrainSet& set, const TrainingConfig& cfg);
TrainResult train(const TrainSet& set, const TrainingConfig& cfg, const TrainerState& state);

}  // namespace tbg::fmtrain

#endif  // TBG_FMTRAIN_TRAINER_HPP
