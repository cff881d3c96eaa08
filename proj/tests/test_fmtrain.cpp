//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tbg/cnf/prior.hpp"
#include "tbg/errors.hpp"
#include "tbg/fmtrain/cfm.hpp"
#include "tbg/fmtrain/trainer.hpp"
#include "tbg/numcore/matrix.hpp"
#include "tbg/numcore/rng.hpp"
#include "tbg/targets/gmm.hpp"
#include "tbg/vecfield/egnn.hpp"

using namespace tbg;
using fmtrain::FlowMatchBatch;
using fmtrain::FlowMatchItem;
using fmtrain::TrainingConfig;
using fmtrain::TrainMolecule;
using fmtrain::TrainSet;
using numcore::Matrix;
using numcore::ParamVector;
using numcore::Rng;
using vecfield::EgnnConfig;

namespace {

std::vector<double> random_mean_free(Rng& rng, int n, int dim) {
  std::vector<double> x(static_cast<std::size_t>(n) * dim);
  for (auto& c : x) c = rng.normal();
  cnf::project_mean_free(x, dim);
  return x;
}

Matrix identity_embedding(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

FlowMatchItem make_item(Rng& rng, int mol, int n, int dim, double t, double sigma) {
  FlowMatchItem item;
  item.molecule_id = mol;
  item.x0 = random_mean_free(rng, n, dim);
  item.x1 = random_mean_free(rng, n, dim);
  item.t = t;
  item.xt = fmtrain::sample_conditional(item.x0, item.x1, t, sigma, dim, rng);
  return item;
}

// Orthonormal basis of the mean-free subspace for three atoms on a line;
// maps planar mixture draws onto mean-free one-dimensional coordinates.
std::vector<double> plane_to_atoms(double z1, double z2) {
  const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
  return {z1 / s2 + z2 / s6, -z1 / s2 + z2 / s6, -2.0 * z2 / s6};
}

// Two asymmetric mixture modes in the plane; the training target for the
// loss-decrease check.
targets::GmmTarget plane_gmm() {
  return targets::GmmTarget({{1.2, 0.8}, {-1.2, -0.8}},
                            {{0.25, 0.0, 0.0, 0.25}, {0.25, 0.0, 0.0, 0.25}}, {0.7, 0.3});
}

TrainSet gmm_train_set(int n_frames, std::uint64_t seed) {
  const targets::GmmTarget gmm = plane_gmm();
  TrainMolecule mol;
  mol.name = "triatom-line";
  mol.embedding = identity_embedding(3);
  Rng rng(seed);
  for (int i = 0; i < n_frames; ++i) {
    double z[2];
    gmm.sample(rng, z);
    mol.frames.push_back(plane_to_atoms(z[0], z[1]));
  }
  TrainSet set;
  set.dim = 1;
  set.molecules.push_back(std::move(mol));
  return set;
}

}  // namespace

TEST_CASE("conditional sampling: endpoints, interpolant, and noise scale") {
  Rng rng(3);
  const auto x0 = random_mean_free(rng, 4, 3);
  const auto x1 = random_mean_free(rng, 4, 3);

  // sigma = 0 hits the endpoints exactly.
  CHECK(fmtrain::sample_conditional(x0, x1, 0.0, 0.0, 3, rng) == x0);
  CHECK(fmtrain::sample_conditional(x0, x1, 1.0, 0.0, 3, rng) == x1);
  const auto mid = fmtrain::sample_conditional(x0, x1, 0.3, 0.0, 3, rng);
  for (std::size_t i = 0; i < mid.size(); ++i) {
    CHECK(mid[i] == doctest::Approx(0.3 * x1[i] + 0.7 * x0[i]).epsilon(1e-15));
  }

  // Noise is mean-free and carries total variance sigma^2 * dim * (n-1).
  const double sigma = 0.01;
  double sq_sum = 0.0;
  const long n_draws = 100000;
  for (long k = 0; k < n_draws; ++k) {
    const auto xt = fmtrain::sample_conditional(x0, x1, 0.4, sigma, 3, rng);
    CHECK(cnf::mean_free_defect(xt, 3) <= 1e-12);
    for (std::size_t i = 0; i < xt.size(); ++i) {
      const double d = xt[i] - (0.4 * x1[i] + 0.6 * x0[i]);
      sq_sum += d * d;
    }
  }
  const double dprime = 3.0 * (4 - 1);
  CHECK(sq_sum / static_cast<double>(n_draws) ==
        doctest::Approx(sigma * sigma * dprime).epsilon(0.01));

  CHECK_THROWS_AS(fmtrain::sample_conditional(x0, x1, 1.2, 0.0, 3, rng), contract_error);
  CHECK_THROWS_AS(fmtrain::sample_conditional(x0, x1, 0.5, -0.1, 3, rng), contract_error);
  CHECK_THROWS_AS(
      fmtrain::sample_conditional(x0, std::vector<double>(9, 0.0), 0.5, 0.0, 3, rng),
      contract_error);
}

TEST_CASE("loss: analytic velocity hooks") {
  Rng rng(11);
  FlowMatchBatch batch = {make_item(rng, 0, 4, 3, 0.25, 0.0)};

  // Perfect regression: v identical to the target velocity.
  const auto perfect = [](const FlowMatchItem& item, double* v) {
    for (std::size_t k = 0; k < item.x0.size(); ++k) v[k] = item.x1[k] - item.x0[k];
  };
  CHECK(fmtrain::cfm_loss(batch, perfect, 3) == 0.0);

  // Constant field, single item: loss = ||c - (x1-x0)||^2 / n_atoms.
  const double c = 0.37;
  const auto constant = [c](const FlowMatchItem& item, double* v) {
    for (std::size_t k = 0; k < item.x0.size(); ++k) v[k] = c;
  };
  double expect = 0.0;
  for (std::size_t k = 0; k < batch[0].x0.size(); ++k) {
    const double d = c - (batch[0].x1[k] - batch[0].x0[k]);
    expect += d * d;
  }
  expect /= 4.0;
  CHECK(fmtrain::cfm_loss(batch, constant, 3) == doctest::Approx(expect).epsilon(1e-15));

  // A common bias constant scales the loss by exactly that constant.
  FlowMatchBatch biased = batch;
  biased.push_back(make_item(rng, 0, 4, 3, 0.8, 0.0));
  const double base = fmtrain::cfm_loss(biased, constant, 3);
  for (auto& item : biased) item.bias_weight = 2.5;
  CHECK(fmtrain::cfm_loss(biased, constant, 3) == doctest::Approx(2.5 * base).epsilon(1e-14));

  // Per-atom normalization: tiling every atom twice (doubling both the
  // squared error and the atom count) leaves the loss unchanged.
  FlowMatchItem doubled = batch[0];
  doubled.x0.insert(doubled.x0.end(), batch[0].x0.begin(), batch[0].x0.end());
  doubled.x1.insert(doubled.x1.end(), batch[0].x1.begin(), batch[0].x1.end());
  doubled.xt.insert(doubled.xt.end(), batch[0].xt.begin(), batch[0].xt.end());
  const double single = fmtrain::cfm_loss({batch[0]}, constant, 3);
  CHECK(fmtrain::cfm_loss({doubled}, constant, 3) == doctest::Approx(single).epsilon(1e-14));

  CHECK_THROWS_AS(fmtrain::cfm_loss({}, constant, 3), contract_error);
  const auto broken = [](const FlowMatchItem& item, double* v) {
    for (std::size_t k = 0; k < item.x0.size(); ++k) v[k] = std::nan("");
  };
  CHECK_THROWS_AS(fmtrain::cfm_loss(batch, broken, 3), numeric_error);
}

TEST_CASE("loss: three-item batch matches an independent hand evaluation") {
  Rng rng(21);
  FlowMatchBatch batch;
  batch.push_back(make_item(rng, 0, 3, 3, 0.1, 0.0));
  batch.push_back(make_item(rng, 0, 5, 3, 0.6, 0.0));
  batch.push_back(make_item(rng, 0, 4, 3, 0.9, 0.0));
  batch[0].bias_weight = 1.0;
  batch[1].bias_weight = 0.5;
  batch[2].bias_weight = 2.0;

  // Affine probe velocity: v = 2*xt + 1 elementwise.
  const auto affine = [](const FlowMatchItem& item, double* v) {
    for (std::size_t k = 0; k < item.xt.size(); ++k) v[k] = 2.0 * item.xt[k] + 1.0;
  };

  // Independent evaluation with plain loops.
  double by_hand = 0.0;
  for (const FlowMatchItem& item : batch) {
    double sq = 0.0;
    for (std::size_t k = 0; k < item.x0.size(); ++k) {
      const double v = 2.0 * item.xt[k] + 1.0;
      const double d = v - (item.x1[k] - item.x0[k]);
      sq += d * d;
    }
    by_hand += item.bias_weight * sq / (static_cast<double>(item.x0.size()) / 3.0);
  }
  by_hand /= 3.0;

  CHECK(fmtrain::cfm_loss(batch, affine, 3) == doctest::Approx(by_hand).epsilon(1e-14));
}

TEST_CASE("loss: network path agrees with the hook path and its gradient with FD") {
  EgnnConfig cfg;
  cfg.n_layers = 2;
  cfg.n_hidden = 8;
  cfg.n_embedding = 3;
  ParamVector p = vecfield::init_egnn_params(cfg, 5);
  Rng prng = Rng::stream(5, 1);
  for (auto& v : p.flat()) v = prng.uniform(-0.4, 0.4);

  // Mixed-size batch: a three-atom and a four-atom molecule.
  const std::vector<Matrix> embeddings = {identity_embedding(3),
                                          Matrix::from(4, 3,
                                                       {1, 0, 0,  //
                                                        0, 1, 0,  //
                                                        0, 0, 1,  //
                                                        1, 0, 0})};
  Rng rng(33);
  FlowMatchBatch batch;
  batch.push_back(make_item(rng, 0, 3, 3, 0.2, 0.01));
  batch.push_back(make_item(rng, 1, 4, 3, 0.7, 0.01));
  batch[1].bias_weight = 1.75;

  const double via_hook = fmtrain::cfm_loss(
      batch,
      [&](const FlowMatchItem& item, double* v) {
        const auto vel = vecfield::egnn_forward(
            cfg, p, item.t, item.xt, embeddings[static_cast<std::size_t>(item.molecule_id)],
            3);
        for (std::size_t k = 0; k < vel.size(); ++k) v[k] = vel[k];
      },
      3);
  CHECK(fmtrain::cfm_loss_egnn(cfg, p, batch, embeddings, 3) ==
        doctest::Approx(via_hook).epsilon(1e-13));

  std::vector<double> grad;
  const double via_tape = fmtrain::cfm_loss_egnn_grad(cfg, p, batch, embeddings, 3, grad);
  CHECK(via_tape == doctest::Approx(via_hook).epsilon(1e-12));
  REQUIRE(grad.size() == p.size());

  // Central differences on the plain path.
  Rng probe_rng(7);
  for (int probe = 0; probe < 20; ++probe) {
    const std::size_t idx = static_cast<std::size_t>(probe_rng.below(p.size()));
    const double h = 1e-6;
    const double saved = p.flat()[idx];
    p.flat()[idx] = saved + h;
    const double up = fmtrain::cfm_loss_egnn(cfg, p, batch, embeddings, 3);
    p.flat()[idx] = saved - h;
    const double dn = fmtrain::cfm_loss_egnn(cfg, p, batch, embeddings, 3);
    p.flat()[idx] = saved;
    const double fd = (up - dn) / (2.0 * h);
    CHECK(std::fabs(fd - grad[idx]) <= 1e-4 * std::max(1.0, std::fabs(fd)));
  }
}

TEST_CASE("loss: invariant under simultaneous rotation of the batch") {
  EgnnConfig cfg;
  cfg.n_layers = 2;
  cfg.n_hidden = 8;
  cfg.n_embedding = 3;
  ParamVector p = vecfield::init_egnn_params(cfg, 9);
  Rng prng = Rng::stream(9, 1);
  for (auto& v : p.flat()) v = prng.uniform(-0.4, 0.4);
  const std::vector<Matrix> embeddings = {identity_embedding(3)};

  Rng rng(41);
  FlowMatchBatch batch = {make_item(rng, 0, 3, 3, 0.35, 0.0),
                          make_item(rng, 0, 3, 3, 0.65, 0.0)};
  const double base = fmtrain::cfm_loss_egnn(cfg, p, batch, embeddings, 3);

  // Rotation about z by a fixed angle.
  const double a = 0.9, ca = std::cos(a), sa = std::sin(a);
  auto rotate = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i + 2 < x.size(); i += 3) {
      const double rx = ca * x[i] - sa * x[i + 1];
      const double ry = sa * x[i] + ca * x[i + 1];
      x[i] = rx;
      x[i + 1] = ry;
    }
  };
  for (auto& item : batch) {
    rotate(item.x0);
    rotate(item.x1);
    rotate(item.xt);
  }
  CHECK(fmtrain::cfm_loss_egnn(cfg, p, batch, embeddings, 3) ==
        doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("trainer: batch assembly is deterministic and structured") {
  TrainSet set = gmm_train_set(20, 123);
  set.molecules.push_back(set.molecules[0]);
  set.molecules[1].name = "copy";
  for (std::size_t f = 0; f < set.molecules[1].frames.size(); ++f) {
    set.molecules[1].frame_bias.push_back(100.0 + static_cast<double>(f));
  }

  TrainingConfig cfg;
  cfg.model.n_layers = 2;
  cfg.model.n_hidden = 8;
  cfg.model.n_embedding = 3;
  cfg.samples_per_molecule = 3;
  cfg.sigma = 0.01;
  cfg.seed = 77;

  const FlowMatchBatch b1 = fmtrain::assemble_batch(set, cfg, 4);
  const FlowMatchBatch b2 = fmtrain::assemble_batch(set, cfg, 4);
  const FlowMatchBatch b3 = fmtrain::assemble_batch(set, cfg, 5);
  REQUIRE(b1.size() == 6);
  for (std::size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1[i].molecule_id == (i < 3 ? 0 : 1));
    CHECK(b1[i].x0 == b2[i].x0);  // bitwise: counter-stream determinism
    CHECK(b1[i].xt == b2[i].xt);
    CHECK(b1[i].t == b2[i].t);
    CHECK(b1[i].t >= 0.0);
    CHECK(b1[i].t <= 1.0);
    CHECK(cnf::mean_free_defect(b1[i].x0, set.dim) <= 1e-12);
    CHECK(cnf::mean_free_defect(b1[i].xt, set.dim) <= 1e-12);
  }
  CHECK(b1[0].x0 != b3[0].x0);

  // Bias weights follow the chosen frame.
  for (std::size_t i = 3; i < 6; ++i) {
    const auto& frames = set.molecules[1].frames;
    bool matched = false;
    for (std::size_t f = 0; f < frames.size(); ++f) {
      if (b1[i].x1 == frames[f]) {
        CHECK(b1[i].bias_weight == 100.0 + static_cast<double>(f));
        matched = true;
        break;
      }
    }
    CHECK(matched);
  }
  // Molecule 0 has no bias array: weight defaults to 1.
  CHECK(b1[0].bias_weight == 1.0);
}

TEST_CASE("trainer: loss decreases on the planar mixture lane") {
  TrainSet set = gmm_train_set(400, 2026);
  TrainingConfig cfg;
  cfg.model.n_layers = 2;
  cfg.model.n_hidden = 16;
  cfg.model.n_embedding = 3;
  cfg.samples_per_molecule = 3;
  cfg.sigma = 0.01;
  cfg.seed = 1;
  cfg.stages = {{1e-3, 600}};

  const fmtrain::TrainResult res = fmtrain::train(set, cfg);
  REQUIRE(res.loss_history.size() == 600);
  double lead = 0.0, trail = 0.0;
  for (int i = 0; i < 100; ++i) {
    lead += res.loss_history[static_cast<std::size_t>(i)];
    trail += res.loss_history[static_cast<std::size_t>(500 + i)];
  }
  CHECK(trail / 100.0 < lead / 100.0);
  CHECK(res.log_lines.size() == 600);
  CHECK(res.log_lines[0].rfind("step=0 stage=0 lr=0.001 loss=", 0) == 0);
  CHECK(res.final_state.step == 600);
  CHECK(std::isfinite(res.wall_seconds));
}

TEST_CASE("trainer: resuming from a snapshot reproduces the run bit for bit") {
  TrainSet set = gmm_train_set(60, 5);
  TrainingConfig cfg;
  cfg.model.n_layers = 2;
  cfg.model.n_hidden = 8;
  cfg.model.n_embedding = 3;
  cfg.samples_per_molecule = 2;
  cfg.sigma = 0.01;
  cfg.seed = 13;
  cfg.stages = {{1e-3, 20}, {1e-4, 10}};
  cfg.checkpoint_every = 10;

  const fmtrain::TrainResult full = fmtrain::train(set, cfg);
  REQUIRE(full.snapshots.size() == 2);  // steps 10 and 20; the end is not snapshotted
  CHECK(full.snapshots[0].step == 10);
  CHECK(full.snapshots[1].step == 20);

  const fmtrain::TrainResult resumed = fmtrain::train(set, cfg, full.snapshots[0]);
  CHECK(resumed.params.flat() == full.params.flat());  // bitwise
  CHECK(resumed.final_state.adam.m == full.final_state.adam.m);
  CHECK(resumed.final_state.adam.v == full.final_state.adam.v);
  REQUIRE(resumed.loss_history.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(resumed.loss_history[i] == full.loss_history[10 + i]);
    CHECK(resumed.log_lines[i] == full.log_lines[10 + i]);
  }

  // Stage boundaries: step 19 is stage 0, step 20 is stage 1.
  CHECK(full.log_lines[19].rfind("step=19 stage=0 lr=0.001", 0) == 0);
  CHECK(full.log_lines[20].rfind("step=20 stage=1 lr=0.0001", 0) == 0);
}

TEST_CASE("trainer: configuration and dataset validation") {
  TrainSet set = gmm_train_set(10, 6);
  TrainingConfig cfg;
  cfg.model.n_layers = 2;
  cfg.model.n_hidden = 8;
  cfg.model.n_embedding = 3;
  cfg.stages = {{1e-3, 5}};

  TrainingConfig bad = cfg;
  bad.stages.clear();
  CHECK_THROWS_AS(fmtrain::train(set, bad), config_error);
  bad = cfg;
  bad.stages[0].lr = 0.0;
  CHECK_THROWS_AS(fmtrain::train(set, bad), config_error);
  bad = cfg;
  bad.sigma = -1.0;
  CHECK_THROWS_AS(fmtrain::train(set, bad), config_error);
  bad = cfg;
  bad.samples_per_molecule = 0;
  CHECK_THROWS_AS(fmtrain::train(set, bad), config_error);

  TrainSet empty;
  CHECK_THROWS_AS(fmtrain::train(empty, cfg), contract_error);

  // Mismatched embedding width aborts before the first step, naming the molecule.
  TrainSet wrong = gmm_train_set(10, 6);
  wrong.molecules[0].embedding = identity_embedding(4);
  try {
    fmtrain::train(wrong, cfg);
    FAIL("expected contract_error");
  } catch (const contract_error& err) {
    CHECK(std::string(err.what()).find("triatom-line") != std::string::npos);
  }

  // A frame off the mean-free subspace is rejected.
  TrainSet off = gmm_train_set(10, 6);
  off.molecules[0].frames[3][0] += 0.1;
  CHECK_THROWS_AS(fmtrain::train(off, cfg), contract_error);

  // Bias array length must match the frame count.
  TrainSet lop = gmm_train_set(10, 6);
  lop.molecules[0].frame_bias = {1.0, 2.0};
  CHECK_THROWS_AS(fmtrain::train(lop, cfg), contract_error);

  // Resume state must match the model layout and step range.
  fmtrain::TrainerState stale;
  stale.step = 99;
  stale.params = vecfield::init_egnn_params(cfg.model, 0);
  stale.adam = numcore::AdamState::zeros(stale.params.size());
  CHECK_THROWS_AS(fmtrain::train(set, cfg, stale), contract_error);
}
