//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tbg/dataio/hash.hpp"
#include "tbg/errors.hpp"
#include "tbg/numcore/rng.hpp"
#include "tbg/numcore/tape.hpp"
#include "tbg/targets/fixtures.hpp"
#include "tbg/vecfield/classtable.hpp"
#include "tbg/vecfield/dense_field.hpp"
#include "tbg/vecfield/egnn.hpp"
#include "tbg/vecfield/embedding.hpp"

using namespace tbg;
using namespace tbg::vecfield;
using molkit::Element;
using molkit::Topology;
using numcore::Matrix;
using numcore::ParamVector;
using numcore::Rng;
using numcore::Tape;

namespace {

// Rodrigues rotation about a normalized axis.
std::array<double, 9> rotation_matrix(double ax, double ay, double az, double angle) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  ax /= n;
  ay /= n;
  az /= n;
  const double c = std::cos(angle), s = std::sin(angle), u = 1.0 - c;
  return {c + ax * ax * u,      ax * ay * u - az * s, ax * az * u + ay * s,
          ay * ax * u + az * s, c + ay * ay * u,      ay * az * u - ax * s,
          az * ax * u - ay * s, az * ay * u + ax * s, c + az * az * u};
}

std::vector<double> rotate_all(const std::array<double, 9>& r, const std::vector<double>& x) {
  std::vector<double> out(x.size());
  for (size_t i = 0; i + 2 < x.size(); i += 3) {
    for (int a = 0; a < 3; ++a)
      out[i + a] = r[3 * a] * x[i] + r[3 * a + 1] * x[i + 1] + r[3 * a + 2] * x[i + 2];
  }
  return out;
}

std::vector<double> random_coords(Rng& rng, int n, int dim) {
  std::vector<double> x(static_cast<size_t>(n) * dim);
  for (auto& c : x) c = rng.normal();
  return x;
}

void randomize_params(ParamVector& p, Rng& rng, double bound) {
  for (auto& v : p.flat()) v = rng.uniform(-bound, bound);
}

// One-hot element embedding rows for a hand-picked element list.
Matrix element_onehot(const std::vector<int>& classes, int width) {
  Matrix m(static_cast<int>(classes.size()), width);
  for (size_t i = 0; i < classes.size(); ++i) m(static_cast<int>(i), classes[i]) = 1.0;
  return m;
}

std::vector<Topology> dipeptide_corpus() {
  using targets::ResidueKind;
  const ResidueKind kinds[3] = {ResidueKind::kAla, ResidueKind::kSer, ResidueKind::kCys};
  std::vector<Topology> corpus;
  for (auto r1 : kinds)
    for (auto r2 : kinds) corpus.push_back(targets::transfer_peptide(r1, r2).topology);
  return corpus;
}

// Branched fragment covering the merge rules: two methyl groups on a central
// carbon, an amide-style NH2, a carboxyl pair, and a lone carbonyl oxygen.
Topology merge_rule_fragment() {
  Topology t;
  t.name = "frag";
  t.add_atom(Element::kC, "VAL", 1, "CB");    // 0
  t.add_atom(Element::kC, "VAL", 1, "CG1");   // 1
  t.add_atom(Element::kC, "VAL", 1, "CG2");   // 2
  t.add_atom(Element::kN, "VAL", 1, "ND2");   // 3
  t.add_atom(Element::kC, "VAL", 1, "CG");    // 4
  for (int k = 0; k < 3; ++k) t.add_atom(Element::kH, "VAL", 1, "HG1" + std::to_string(k + 1));
  for (int k = 0; k < 3; ++k) t.add_atom(Element::kH, "VAL", 1, "HG2" + std::to_string(k + 1));
  t.add_atom(Element::kH, "VAL", 1, "HD21");  // 11
  t.add_atom(Element::kH, "VAL", 1, "HD22");  // 12
  t.add_atom(Element::kO, "VAL", 1, "OD1");   // 13
  t.add_atom(Element::kO, "VAL", 1, "OD2");   // 14
  t.add_bond(0, 1);
  t.add_bond(0, 2);
  t.add_bond(0, 3);
  t.add_bond(0, 4);
  for (int k = 0; k < 3; ++k) t.add_bond(1, 5 + k);
  for (int k = 0; k < 3; ++k) t.add_bond(2, 8 + k);
  t.add_bond(3, 11);
  t.add_bond(3, 12);
  t.add_bond(4, 13);
  t.add_bond(4, 14);
  return t;
}

}  // namespace

TEST_CASE("atom class keys merge hydrogens and lone oxygens but never groups") {
  const Topology frag = merge_rule_fragment();

  // Hydrogens on one heavy atom share a key.
  CHECK(atom_class_key(frag, 5) == "H|C|H:CG1");
  CHECK(atom_class_key(frag, 6) == atom_class_key(frag, 5));
  CHECK(atom_class_key(frag, 7) == atom_class_key(frag, 5));
  CHECK(atom_class_key(frag, 11) == "H|N|H:ND2");
  CHECK(atom_class_key(frag, 12) == atom_class_key(frag, 11));

  // The two methyl groups stay distinct.
  CHECK(atom_class_key(frag, 8) == "H|C|H:CG2");
  CHECK(atom_class_key(frag, 8) != atom_class_key(frag, 5));
  CHECK(atom_class_key(frag, 1) == "C|C,H,H,H|CG1");
  CHECK(atom_class_key(frag, 2) == "C|C,H,H,H|CG2");

  // Oxygens on a carboxyl carbon (two oxygen neighbors) keep their names.
  CHECK(atom_class_key(frag, 13) == "O|C|OD1");
  CHECK(atom_class_key(frag, 14) == "O|C|OD2");

  // A lone terminal oxygen is keyed by its carbon instead.
  Topology carbonyl;
  carbonyl.name = "carbonyl";
  carbonyl.add_atom(Element::kC, "ALA", 1, "CA");
  carbonyl.add_atom(Element::kC, "ALA", 1, "C");
  carbonyl.add_atom(Element::kO, "ALA", 1, "O");
  carbonyl.add_bond(0, 1);
  carbonyl.add_bond(1, 2);
  CHECK(atom_class_key(carbonyl, 2) == "O|C|O:C");

  CHECK_THROWS_AS((void)atom_class_key(frag, 99), contract_error);
}

TEST_CASE("class table generated from the dipeptide corpus") {
  const AtomClassTable table = AtomClassTable::build(dipeptide_corpus());

  // Frozen class inventory for the three-residue desk corpus: one CA and one
  // CB class per residue kind, shared backbone classes for the rest.
  const std::vector<std::string> expected = {
      "C|C,C,H,N|CA",  // CA with carbon side chain (ALA)
      "C|C,H,N,O|CA",  // CA with oxygen side chain (SER)
      "C|C,H,N,S|CA",  // CA with sulfur side chain (CYS)
      "C|C,N|C",       // first-residue carbonyl carbon (no oxygen)
      "C|C,O|C",       // second-residue carbonyl carbon
      "C|C|CB",        // ALA side chain
      "H|C|H:CA",      // both alpha hydrogens
      "H|N|H:N",       // amide hydrogen
      "N|C,C|N",       // linking nitrogen
      "N|C,H|N",       // first-residue nitrogen
      "O|C|O:C",       // carbonyl oxygen, keyed by its carbon
      "O|C|O:CA",      // SER side chain oxygen
      "S|C|CB",        // CYS side chain
  };
  REQUIRE(table.size() == 13);
  CHECK(table.keys() == expected);

  // The same template atom at both chain positions lands in one class.
  const Topology ala2 = targets::toy_dipeptide().topology;
  const std::vector<int> cls = table.assign(ala2);
  CHECK(cls[2] == cls[7]);    // both CA
  CHECK(cls[3] == cls[8]);    // both HA
  CHECK(cls[4] == table.index_of("C|C|CB"));
  CHECK(cls[0] == table.index_of("N|C,H|N"));
  CHECK(cls[6] == table.index_of("N|C,C|N"));
  CHECK(cls[11] == table.index_of("O|C|O:C"));

  // Round trip through the persisted form preserves keys and content hash.
  const AtomClassTable reparsed = AtomClassTable::parse(table.serialize());
  CHECK(reparsed.keys() == table.keys());
  CHECK(reparsed.content_hash() == table.content_hash());
  CHECK(dataio::hash_hex(table.content_hash()) == "b64c3074d406fd23");  // frozen

  // An atom whose key is missing from the table is a contract violation.
  const Topology dbw = targets::double_well_molecule().topology;
  CHECK_THROWS_AS((void)table.assign(dbw), contract_error);

  CHECK_THROWS_AS((void)AtomClassTable::parse("atom-class-table v2 0\n"), parse_error);
  CHECK_THROWS_AS((void)AtomClassTable::parse("atom-class-table v1 3\n0 a\n1 b\n"), parse_error);
}

TEST_CASE("embedding variants expose the documented widths and blocks") {
  const AtomClassTable table = AtomClassTable::build(dipeptide_corpus());
  const Topology ala2 = targets::toy_dipeptide().topology;

  EmbeddingOptions tbg{Variant::kTbg, false, 0};
  EmbeddingOptions backbone{Variant::kTbgBackbone, false, 0};
  EmbeddingOptions full{Variant::kTbgFull, true, 2};
  EmbeddingOptions full_bare{Variant::kTbgFull, false, 0};

  CHECK(embedding_width(table, tbg) == 5);
  CHECK(embedding_width(table, backbone) == 13);
  CHECK(embedding_width(table, full) == 35);  // 13 classes + 20 residues + 2 positions
  CHECK(embedding_width(table, full_bare) == 13);

  // Element-only rows: every carbon is the same one-hot.
  const Matrix e_tbg = build_embedding(ala2, table, tbg);
  REQUIRE(e_tbg.rows() == 12);
  for (int i : {2, 4, 5, 7, 9, 10}) {  // CA, CB, C atoms of ALA-ALA
    for (int c = 0; c < 5; ++c) CHECK(e_tbg(i, c) == (c == 0 ? 1.0 : 0.0));
  }
  CHECK(e_tbg(0, 1) == 1.0);   // N
  CHECK(e_tbg(11, 2) == 1.0);  // O
  CHECK(e_tbg(1, 3) == 1.0);   // H

  // Backbone rows: named backbone classes first, element fallback after.
  const Matrix e_bb = build_embedding(ala2, table, backbone);
  auto hot = [](const Matrix& m, int row) {
    int idx = -1;
    for (int c = 0; c < m.cols(); ++c)
      if (m(row, c) != 0.0) {
        REQUIRE(m(row, c) == 1.0);
        REQUIRE(idx == -1);
        idx = c;
      }
    return idx;
  };
  CHECK(hot(e_bb, 0) == 0);    // N
  CHECK(hot(e_bb, 2) == 1);    // CA
  CHECK(hot(e_bb, 10) == 2);   // C
  CHECK(hot(e_bb, 11) == 3);   // O
  CHECK(hot(e_bb, 1) == 4);    // HN
  CHECK(hot(e_bb, 3) == 5);    // HA
  CHECK(hot(e_bb, 4) == 8);    // CB is not a backbone name; carbon fallback
  const Matrix e_bb_cys =
      build_embedding(targets::transfer_peptide(targets::ResidueKind::kCys,
                                                targets::ResidueKind::kSer).topology,
                      table, backbone);
  CHECK(hot(e_bb_cys, 4) == 12);  // sulfur fallback
  CHECK(hot(e_bb_cys, 9) == 10);  // oxygen fallback

  // Full variant: same residue at positions 1 and 2 differs only in the
  // position block.
  const Matrix e_full = build_embedding(ala2, table, full);
  for (int c = 0; c < 33; ++c) CHECK(e_full(2, c) == e_full(7, c));
  CHECK(e_full(2, 33) == 1.0);
  CHECK(e_full(2, 34) == 0.0);
  CHECK(e_full(7, 33) == 0.0);
  CHECK(e_full(7, 34) == 1.0);

  // Hydrogens on the same heavy atom are embedded identically.
  const Topology frag = merge_rule_fragment();
  const AtomClassTable frag_table = AtomClassTable::build({frag});
  const Matrix e_frag = build_embedding(frag, frag_table, {Variant::kTbgFull, false, 0});
  for (int c = 0; c < e_frag.cols(); ++c) {
    CHECK(e_frag(5, c) == e_frag(6, c));
    CHECK(e_frag(5, c) == e_frag(7, c));
    CHECK(e_frag(11, c) == e_frag(12, c));
  }

  // Residue blocks reject out-of-range positions and unknown residues.
  CHECK_THROWS_AS((void)build_embedding(ala2, table, EmbeddingOptions{Variant::kTbgFull, true, 1}),
                  contract_error);
  const Topology dbw = targets::double_well_molecule().topology;
  const AtomClassTable dbw_table = AtomClassTable::build({dbw});
  CHECK_THROWS_AS((void)build_embedding(dbw, dbw_table, EmbeddingOptions{Variant::kTbgFull, true, 2}),
                  contract_error);
  CHECK(build_embedding(dbw, dbw_table, EmbeddingOptions{Variant::kTbgFull, false, 0}).cols() == 4);

  CHECK(variant_from_name("tbg") == Variant::kTbg);
  CHECK(variant_from_name(variant_name(Variant::kTbgFull)) == Variant::kTbgFull);
  CHECK_THROWS_AS((void)variant_from_name("tbg-extra"), contract_error);
}

TEST_CASE("graph field presets and parameter layout") {
  const EgnnConfig big = EgnnConfig::preset("transfer-tbg-full");
  CHECK(big.n_layers == 9);
  CHECK(big.n_hidden == 128);
  CHECK(big.n_embedding == 76);
  CHECK(EgnnConfig::preset("transfer-tbg").n_embedding == 5);
  CHECK(EgnnConfig::preset("transfer-tbg-backbone").n_embedding == 13);
  const EgnnConfig single = EgnnConfig::preset("single-tbg-full");
  CHECK(single.n_layers == 5);
  CHECK(single.n_hidden == 64);
  CHECK(single.n_embedding == 15);
  CHECK(EgnnConfig::preset("single-backbone").n_embedding == 8);
  CHECK_THROWS_AS((void)EgnnConfig::preset("giant"), config_error);

  const EgnnConfig cfg{2, 8, 5, true};
  const ParamVector p = init_egnn_params(cfg, 11);
  REQUIRE(p.n_segments() == 32);
  CHECK(p.segment(0).name == "l0.e.w1");
  CHECK(p.segment(0).rows == 2 * cfg.feature_dim() + 1);
  CHECK(p.segment(0).cols == 8);
  CHECK(p.segment(15).name == "l0.h.b2");
  CHECK(p.segment(15).cols == cfg.feature_dim());
  CHECK(p.segment(16).name == "l1.e.w1");

  // Displacement head starts at zero; everything else is drawn nonzero.
  for (int l = 0; l < 2; ++l) {
    const int w2 = p.find("l" + std::to_string(l) + ".d.w2");
    const int b2 = p.find("l" + std::to_string(l) + ".d.b2");
    REQUIRE(w2 >= 0);
    for (size_t k = 0; k < p.segment(w2).count(); ++k) CHECK(p.segment_data(w2)[k] == 0.0);
    CHECK(p.segment_data(b2)[0] == 0.0);
  }
  double max_abs = 0.0;
  for (double v : p.flat()) max_abs = std::max(max_abs, std::abs(v));
  CHECK(max_abs > 0.0);
  CHECK(max_abs < 1.0);

  const ParamVector q = init_egnn_params(cfg, 11);
  CHECK(p.flat() == q.flat());
  const ParamVector r = init_egnn_params(cfg, 12);
  CHECK(p.flat() != r.flat());
}

TEST_CASE("freshly initialized fields are exactly zero") {
  const EgnnConfig cfg{3, 16, 5, true};
  const ParamVector p = init_egnn_params(cfg, 7);
  const auto fx = targets::toy_dipeptide();
  const AtomClassTable table = AtomClassTable::build(dipeptide_corpus());
  const Matrix emb = build_embedding(fx.topology, table, {Variant::kTbg, false, 0});

  const std::vector<double> v = egnn_forward(cfg, p, 0.3, fx.rest, emb, 3);
  for (double c : v) CHECK(c == 0.0);
  std::vector<double> v2;
  CHECK(egnn_divergence(cfg, p, 0.3, fx.rest, emb, 3, &v2) == 0.0);
  for (double c : v2) CHECK(c == 0.0);
}

TEST_CASE("graph field output is mean-free and collinear for two atoms") {
  Rng rng(2024);
  const EgnnConfig cfg{2, 16, 5, true};
  ParamVector p = init_egnn_params(cfg, 3);
  randomize_params(p, rng, 0.5);

  const Matrix emb5 = element_onehot({0, 0, 1, 2, 0}, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> x = random_coords(rng, 5, 3);
    const std::vector<double> v = egnn_forward(cfg, p, 0.5, x, emb5, 3);
    for (int a = 0; a < 3; ++a) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += v[static_cast<size_t>(3 * i + a)];
      CHECK(std::abs(s) <= 1e-12);
    }
  }

  // Two identical atoms: velocities are opposite and parallel to the bond
  // axis, for any parameters.
  const Matrix emb2 = element_onehot({0, 0}, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> x = random_coords(rng, 2, 3);
    const std::vector<double> v = egnn_forward(cfg, p, 0.25, x, emb2, 3);
    double cross = 0.0;
    const double ux = x[0] - x[3], uy = x[1] - x[4], uz = x[2] - x[5];
    const double cx = v[1] * uz - v[2] * uy;
    const double cy = v[2] * ux - v[0] * uz;
    const double cz = v[0] * uy - v[1] * ux;
    cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    for (int a = 0; a < 3; ++a) CHECK(v[static_cast<size_t>(a)] == doctest::Approx(-v[static_cast<size_t>(3 + a)]).epsilon(1e-12));
    CHECK(cross <= 1e-12);
  }
}

TEST_CASE("graph field symmetries: rotation, permutation, translation") {
  Rng rng(77);
  const EgnnConfig cfg{2, 16, 5, true};
  ParamVector p = init_egnn_params(cfg, 5);
  randomize_params(p, rng, 0.5);
  const Matrix emb = element_onehot({0, 0, 0, 2, 1}, 5);
  const double t = 0.6;

  const std::vector<double> x = random_coords(rng, 5, 3);
  const std::vector<double> v = egnn_forward(cfg, p, t, x, emb, 3);

  for (int trial = 0; trial < 20; ++trial) {
    const auto R = rotation_matrix(rng.normal(), rng.normal(), rng.normal(),
                                   rng.uniform(0.0, 6.283185307179586));
    const std::vector<double> vr = egnn_forward(cfg, p, t, rotate_all(R, x), emb, 3);
    const std::vector<double> rv = rotate_all(R, v);
    for (size_t k = 0; k < vr.size(); ++k) CHECK(std::abs(vr[k] - rv[k]) <= 1e-10);
  }

  // Swapping two identically embedded atoms permutes the output rows.
  std::vector<double> xp = x;
  for (int a = 0; a < 3; ++a) std::swap(xp[static_cast<size_t>(a)], xp[static_cast<size_t>(6 + a)]);
  const std::vector<double> vp = egnn_forward(cfg, p, t, xp, emb, 3);
  for (int a = 0; a < 3; ++a) {
    CHECK(std::abs(vp[static_cast<size_t>(a)] - v[static_cast<size_t>(6 + a)]) <= 1e-10);
    CHECK(std::abs(vp[static_cast<size_t>(6 + a)] - v[static_cast<size_t>(a)]) <= 1e-10);
    CHECK(std::abs(vp[static_cast<size_t>(3 + a)] - v[static_cast<size_t>(3 + a)]) <= 1e-10);
  }

  std::vector<double> xt = x;
  for (size_t i = 0; i < xt.size(); i += 3) {
    xt[i] += 1.7;
    xt[i + 1] -= 0.4;
    xt[i + 2] += 2.9;
  }
  const std::vector<double> vt = egnn_forward(cfg, p, t, xt, emb, 3);
  for (size_t k = 0; k < vt.size(); ++k) CHECK(std::abs(vt[k] - v[k]) <= 1e-10);
}

TEST_CASE("recorded graph field matches the direct path and its gradient matches finite differences") {
  Rng rng(404);
  const EgnnConfig cfg{2, 12, 5, true};
  ParamVector p = init_egnn_params(cfg, 9);
  randomize_params(p, rng, 0.4);
  const Matrix emb = element_onehot({0, 1, 2, 0}, 5);
  const std::vector<double> xflat = random_coords(rng, 4, 3);
  Matrix xmat(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 3; ++a) xmat(i, a) = xflat[static_cast<size_t>(3 * i + a)];
  const double t = 0.37;

  const std::vector<double> v_plain = egnn_forward(cfg, p, t, xflat, emb, 3);

  Tape tape;
  std::vector<Tape::NodeId> leaves;
  for (int s = 0; s < p.n_segments(); ++s) {
    const auto& seg = p.segment(s);
    Matrix m(seg.rows, seg.cols);
    std::copy(p.segment_data(s), p.segment_data(s) + seg.count(), m.data());
    leaves.push_back(tape.leaf(std::move(m)));
  }
  const Tape::NodeId xn = tape.constant(xmat);
  const Tape::NodeId vn = egnn_forward_tape(tape, cfg, leaves, t, xn, emb);
  const Matrix& v_tape = tape.value(vn);
  REQUIRE(v_tape.rows() == 4);
  REQUIRE(v_tape.cols() == 3);
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 3; ++a)
      CHECK(std::abs(v_tape(i, a) - v_plain[static_cast<size_t>(3 * i + a)]) <= 1e-12);

  // d||v||^2/dtheta against central differences on the direct path.
  numcore::RecordedFn fn = [&](Tape& tp, const std::vector<Tape::NodeId>& lv) {
    return tp.sqnorm(egnn_forward_tape(tp, cfg, lv, t, tp.constant(xmat), emb));
  };
  double loss0 = 0.0;
  const std::vector<double> g = numcore::grad(fn, p, &loss0);
  REQUIRE(g.size() == p.size());
  double sq = 0.0;
  for (double c : v_plain) sq += c * c;
  CHECK(loss0 == doctest::Approx(sq).epsilon(1e-12));

  auto loss_at = [&](const ParamVector& q) {
    const std::vector<double> vv = egnn_forward(cfg, q, t, xflat, emb, 3);
    double s = 0.0;
    for (double c : vv) s += c * c;
    return s;
  };
  ParamVector q = p;
  for (int probe = 0; probe < 24; ++probe) {
    const size_t idx = static_cast<size_t>(rng.below(p.size()));
    const double h = 1e-6;
    const double saved = q.flat()[idx];
    q.flat()[idx] = saved + h;
    const double up = loss_at(q);
    q.flat()[idx] = saved - h;
    const double dn = loss_at(q);
    q.flat()[idx] = saved;
    const double fd = (up - dn) / (2.0 * h);
    CHECK(std::abs(fd - g[idx]) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("graph field divergence is an exact trace") {
  Rng rng(55);
  const EgnnConfig cfg{2, 12, 5, true};
  ParamVector p = init_egnn_params(cfg, 21);
  randomize_params(p, rng, 0.5);
  const Matrix emb = element_onehot({0, 1, 2, 0}, 5);
  const std::vector<double> x = random_coords(rng, 4, 3);
  const double t = 0.45;

  std::vector<double> v_div;
  const double div = egnn_divergence(cfg, p, t, x, emb, 3, &v_div);

  const std::vector<double> v_plain = egnn_forward(cfg, p, t, x, emb, 3);
  REQUIRE(v_div.size() == v_plain.size());
  for (size_t k = 0; k < v_plain.size(); ++k) CHECK(std::abs(v_div[k] - v_plain[k]) <= 1e-14);

  // Central finite-difference trace.
  double fd_trace = 0.0;
  const double h = 1e-5;
  std::vector<double> xp = x;
  for (size_t k = 0; k < x.size(); ++k) {
    xp[k] = x[k] + h;
    const std::vector<double> vu = egnn_forward(cfg, p, t, xp, emb, 3);
    xp[k] = x[k] - h;
    const std::vector<double> vd = egnn_forward(cfg, p, t, xp, emb, 3);
    xp[k] = x[k];
    fd_trace += (vu[k] - vd[k]) / (2.0 * h);
  }
  CHECK(std::abs(div - fd_trace) <= 1e-5 * std::max(1.0, std::abs(div)));
  CHECK(std::abs(div) > 1e-3);  // the probe is not vacuous

  // The trace is invariant under rotation of the configuration.
  for (int trial = 0; trial < 5; ++trial) {
    const auto R = rotation_matrix(rng.normal(), rng.normal(), rng.normal(), rng.uniform(0.0, 6.28));
    const double div_r = egnn_divergence(cfg, p, t, rotate_all(R, x), emb, 3, nullptr);
    CHECK(std::abs(div_r - div) <= 1e-8);
  }
}

TEST_CASE("dense control field: zero start, exact divergence, no equivariance") {
  const DenseFieldConfig cfg{6, 16, 2};
  ParamVector p = init_dense_params(cfg, 31);
  REQUIRE(p.n_segments() == 6);
  CHECK(p.segment(0).name == "lin0.w");
  CHECK(p.segment(4).name == "out.w");

  Rng rng(11);
  const std::vector<double> x0 = random_coords(rng, 2, 3);
  for (double c : dense_forward(cfg, p, 0.2, x0)) CHECK(c == 0.0);
  CHECK(dense_divergence(cfg, p, 0.2, x0) == 0.0);

  randomize_params(p, rng, 0.6);
  const std::vector<double> v = dense_forward(cfg, p, 0.8, x0);

  // Divergence against the finite-difference trace.
  std::vector<double> vd;
  const double div = dense_divergence(cfg, p, 0.8, x0, &vd);
  for (size_t k = 0; k < v.size(); ++k) CHECK(std::abs(vd[k] - v[k]) <= 1e-14);
  double fd = 0.0;
  std::vector<double> xp = x0;
  for (size_t k = 0; k < x0.size(); ++k) {
    const double h = 1e-6;
    xp[k] = x0[k] + h;
    const double up = dense_forward(cfg, p, 0.8, xp)[k];
    xp[k] = x0[k] - h;
    const double dn = dense_forward(cfg, p, 0.8, xp)[k];
    xp[k] = x0[k];
    fd += (up - dn) / (2.0 * h);
  }
  CHECK(std::abs(div - fd) <= 1e-5 * std::max(1.0, std::abs(div)));

  // Recorded batch evaluation agrees with the direct path row by row.
  Tape tape;
  std::vector<Tape::NodeId> leaves;
  for (int s = 0; s < p.n_segments(); ++s) {
    const auto& seg = p.segment(s);
    Matrix m(seg.rows, seg.cols);
    std::copy(p.segment_data(s), p.segment_data(s) + seg.count(), m.data());
    leaves.push_back(tape.leaf(std::move(m)));
  }
  Matrix batch(3, cfg.n_state);
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < 3; ++r) {
    rows.push_back(random_coords(rng, 2, 3));
    for (int c = 0; c < cfg.n_state; ++c) batch(r, c) = rows.back()[static_cast<size_t>(c)];
  }
  const Tape::NodeId out = dense_forward_tape(tape, cfg, leaves, 0.8, tape.constant(batch));
  for (int r = 0; r < 3; ++r) {
    const std::vector<double> direct = dense_forward(cfg, p, 0.8, rows[static_cast<size_t>(r)]);
    for (int c = 0; c < cfg.n_state; ++c)
      CHECK(std::abs(tape.value(out)(r, c) - direct[static_cast<size_t>(c)]) <= 1e-12);
  }

  // Negative control: this field visibly breaks rotation equivariance, so
  // the equivariance assertions above detect real violations.
  const auto R = rotation_matrix(0.3, -0.8, 0.52, 1.1);
  const std::vector<double> vrot = dense_forward(cfg, p, 0.8, rotate_all(R, x0));
  const std::vector<double> rotv = rotate_all(R, v);
  double max_diff = 0.0;
  for (size_t k = 0; k < vrot.size(); ++k) max_diff = std::max(max_diff, std::abs(vrot[k] - rotv[k]));
  CHECK(max_diff > 1e-3);

  // The packaged field wrappers evaluate the same functions.
  const VectorField field = dense_field(cfg, p);
  REQUIRE(field.n_state == cfg.n_state);
  std::vector<double> v_field(static_cast<size_t>(cfg.n_state));
  field.eval(0.8, x0.data(), v_field.data());
  for (size_t k = 0; k < v.size(); ++k) CHECK(v_field[k] == v[k]);
  std::vector<double> v_from_div(static_cast<size_t>(cfg.n_state));
  CHECK(field.divergence(0.8, x0.data(), v_from_div.data()) == div);
  CHECK(v_from_div == vd);
}

TEST_CASE("packaged graph field wrapper matches the direct calls") {
  Rng rng(909);
  const EgnnConfig cfg{2, 8, 5, true};
  ParamVector p = init_egnn_params(cfg, 1);
  randomize_params(p, rng, 0.5);
  const Matrix emb = element_onehot({0, 0, 1}, 5);
  const std::vector<double> x = random_coords(rng, 3, 3);

  const VectorField field = egnn_field(cfg, p, emb, 3);
  REQUIRE(field.n_state == 9);
  std::vector<double> v_field(9);
  field.eval(0.4, x.data(), v_field.data());
  const std::vector<double> v_direct = egnn_forward(cfg, p, 0.4, x, emb, 3);
  for (int k = 0; k < 9; ++k) CHECK(v_field[static_cast<size_t>(k)] == v_direct[static_cast<size_t>(k)]);

  std::vector<double> v_div(9);
  const double div = field.divergence(0.4, x.data(), v_div.data());
  CHECK(div == egnn_divergence(cfg, p, 0.4, x, emb, 3, nullptr));

  // One-dimensional states work through the same machinery.
  const Matrix emb1 = element_onehot({0, 1, 2}, 5);
  const std::vector<double> x1 = {0.3, -0.9, 0.6};
  const VectorField line = egnn_field(cfg, p, emb1, 1);
  REQUIRE(line.n_state == 3);
  std::vector<double> v1(3);
  line.eval(0.7, x1.data(), v1.data());
  CHECK(std::abs(v1[0] + v1[1] + v1[2]) <= 1e-12);
  const double div1 = line.divergence(0.7, x1.data(), nullptr);
  double fd = 0.0;
  std::vector<double> xp = x1;
  for (size_t k = 0; k < 3; ++k) {
    const double h = 1e-6;
    xp[k] = x1[k] + h;
    std::vector<double> vu(3);
    line.eval(0.7, xp.data(), vu.data());
    xp[k] = x1[k] - h;
    std::vector<double> vdn(3);
    line.eval(0.7, xp.data(), vdn.data());
    xp[k] = x1[k];
    fd += (vu[k] - vdn[k]) / (2.0 * h);
  }
  CHECK(std::abs(div1 - fd) <= 1e-5 * std::max(1.0, std::abs(div1)));
}
