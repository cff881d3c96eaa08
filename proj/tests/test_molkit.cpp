//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "tbg/molkit/bonds.hpp"
#include "tbg/molkit/chirality.hpp"
#include "tbg/molkit/geometry.hpp"
#include "tbg/molkit/isomorphism.hpp"
#include "tbg/molkit/topology.hpp"
#include "tbg/molkit/validity.hpp"
#include "tbg/numcore/rng.hpp"

using namespace tbg;
using namespace tbg::molkit;

namespace {

constexpr double kPi = 3.14159265358979323846;

Coords coords_of(std::initializer_list<double> v) { return Coords(v); }

// Methane-like fragment: one C bonded to four H.
Topology methane_topology() {
  Topology t;
  t.name = "methane";
  t.add_atom(Element::kC, "MOL", 1, "C");
  for (int k = 0; k < 4; ++k) t.add_atom(Element::kH, "MOL", 1, "H" + std::to_string(k + 1));
  for (int k = 1; k <= 4; ++k) t.add_bond(0, k);
  return t;
}

Coords methane_coords() {
  // Tetrahedral-ish placement, C-H near 0.109 nm.
  const double a = 0.109 / std::sqrt(3.0);
  return coords_of({0, 0, 0, a, a, a, a, -a, -a, -a, a, -a, -a, -a, a});
}

// A five-atom molecule with one chiral centre: C bonded to N, O, S, H.
Topology chiral_topology() {
  Topology t;
  t.name = "chiral5";
  t.add_atom(Element::kC, "MOL", 1, "CA");
  t.add_atom(Element::kN, "MOL", 1, "N");
  t.add_atom(Element::kO, "MOL", 1, "O");
  t.add_atom(Element::kS, "MOL", 1, "S");
  t.add_atom(Element::kH, "MOL", 1, "HA");
  for (int k = 1; k <= 4; ++k) t.add_bond(0, k);
  ChiralCenter c;
  c.center = 0;
  c.substituents = {1, 2, 3, 4};
  c.ref_sign = 0;  // filled in by the test from the build geometry
  t.chirals.push_back(c);
  return t;
}

Coords chiral_coords() {
  // Substituents near their covalent distances from the centre, arranged
  // tetrahedrally so the determinant is comfortably away from zero.
  const double rn = 0.147, ro = 0.142, rs = 0.181, rh = 0.107;
  Coords x(15, 0.0);
  auto put = [&](int i, double ux, double uy, double uz, double r) {
    const double n = std::sqrt(ux * ux + uy * uy + uz * uz);
    x[static_cast<size_t>(3 * i)] = r * ux / n;
    x[static_cast<size_t>(3 * i + 1)] = r * uy / n;
    x[static_cast<size_t>(3 * i + 2)] = r * uz / n;
  };
  put(1, 1, 1, 1, rn);
  put(2, 1, -1, -1, ro);
  put(3, -1, 1, -1, rs);
  put(4, -1, -1, 1, rh);
  return x;
}

}  // namespace

TEST_CASE("torsion value fixtures") {
  // Planar cis chain.
  Coords cis = coords_of({0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0});
  CHECK(std::fabs(torsion(cis, 0, 1, 2, 3)) < 1e-12);
  // Planar trans chain.
  Coords trans = coords_of({0, 0, 0, 1, 0, 0, 1, 1, 0, 2, 1, 0});
  CHECK(std::fabs(torsion(trans, 0, 1, 2, 3)) == doctest::Approx(kPi));
  // Right angle out of plane gives +-pi/2 with opposite signs for mirror pair.
  Coords up = coords_of({0, 0, 0, 1, 0, 0, 1, 1, 0, 1, 1, 1});
  Coords dn = coords_of({0, 0, 0, 1, 0, 0, 1, 1, 0, 1, 1, -1});
  CHECK(torsion(up, 0, 1, 2, 3) == doctest::Approx(-torsion(dn, 0, 1, 2, 3)));
  CHECK(std::fabs(torsion(up, 0, 1, 2, 3)) == doctest::Approx(kPi / 2));
}

TEST_CASE("torsion symmetry properties") {
  numcore::Rng rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    Coords x(12);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const double fwd = torsion(x, 0, 1, 2, 3);
    // Reading the chain from the other end reports the same signed angle:
    // the viewing direction and the front/back roles both swap, so the
    // rotation sense is preserved.
    const double rev = torsion(x, 3, 2, 1, 0);
    CHECK(angular_distance(fwd, rev) < 1e-12);
    // A mirror image reverses the rotation sense.
    const double mir = torsion(mirror_conformation(x), 0, 1, 2, 3);
    CHECK(angular_distance(fwd, -mir) < 1e-12);
  }
}

TEST_CASE("torsion rigid-motion invariance") {
  numcore::Rng rng(31);
  Coords x(12);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  const double ref = torsion(x, 0, 1, 2, 3);
  // Rotation about a random axis (Rodrigues) plus a translation.
  double ax[3] = {rng.normal(), rng.normal(), rng.normal()};
  double an = std::sqrt(ax[0] * ax[0] + ax[1] * ax[1] + ax[2] * ax[2]);
  for (double& a : ax) a /= an;
  const double th = 1.1, ct = std::cos(th), st = std::sin(th);
  Coords y(12);
  for (int i = 0; i < 4; ++i) {
    const double* p = atom_xyz(x, i);
    double cr[3] = {ax[1] * p[2] - ax[2] * p[1], ax[2] * p[0] - ax[0] * p[2],
                    ax[0] * p[1] - ax[1] * p[0]};
    double dot = ax[0] * p[0] + ax[1] * p[1] + ax[2] * p[2];
    for (int k = 0; k < 3; ++k)
      y[static_cast<size_t>(3 * i + k)] = p[k] * ct + cr[k] * st + ax[k] * dot * (1 - ct) + 0.5 * (k + 1);
  }
  CHECK(angular_distance(torsion(y, 0, 1, 2, 3), ref) < 1e-10);
}

TEST_CASE("angle and distance basics") {
  Coords x = coords_of({0, 0, 0, 1, 0, 0, 1, 1, 0});
  CHECK(distance(x, 0, 1) == doctest::Approx(1.0));
  CHECK(distance(x, 0, 2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(angle(x, 0, 1, 2) == doctest::Approx(kPi / 2));
  CHECK(angle(x, 1, 0, 2) == doctest::Approx(kPi / 4));
}

TEST_CASE("wrap and angular distance") {
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(-3 * kPi / 2) == doctest::Approx(kPi / 2));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(angular_distance(-3.0, 3.0) == doctest::Approx(2 * kPi - 6.0));
  CHECK(angular_distance(0.25, -0.25) == doctest::Approx(0.5));
}

TEST_CASE("place_atom reproduces requested internals") {
  numcore::Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    Coords x(12, 0.0);
    // Anchors C, B, A at random non-degenerate positions.
    for (int k = 0; k < 9; ++k) x[static_cast<size_t>(k)] = rng.uniform(-0.4, 0.4);
    if (angle(x, 0, 1, 2) < 0.3 || angle(x, 0, 1, 2) > kPi - 0.3) continue;
    const double bond = rng.uniform(0.1, 0.2);
    const double ang = rng.uniform(0.5, kPi - 0.5);
    const double tors = rng.uniform(-kPi + 1e-3, kPi);
    place_atom(x, 3, 2, 1, 0, bond, ang, tors);
    CHECK(distance(x, 3, 2) == doctest::Approx(bond).epsilon(1e-10));
    CHECK(angle(x, 3, 2, 1) == doctest::Approx(ang).epsilon(1e-10));
    CHECK(angular_distance(torsion(x, 3, 2, 1, 0), tors) < 1e-9);
  }
}

TEST_CASE("build_from_internal chain") {
  std::vector<ZEntry> rows(3);
  rows[0] = ZEntry{1, 0, -1, -1, 0.15, 0.0, 0.0};
  rows[1] = ZEntry{2, 1, 0, -1, 0.14, 1.9, 0.0};
  rows[2] = ZEntry{3, 2, 1, 0, 0.13, 2.0, 1.0};
  Coords x = build_from_internal(4, rows);
  CHECK(distance(x, 0, 1) == doctest::Approx(0.15));
  CHECK(distance(x, 1, 2) == doctest::Approx(0.14));
  CHECK(angle(x, 2, 1, 0) == doctest::Approx(1.9));
  CHECK(distance(x, 2, 3) == doctest::Approx(0.13));
  CHECK(angle(x, 3, 2, 1) == doctest::Approx(2.0));
  CHECK(angular_distance(torsion(x, 3, 2, 1, 0), 1.0) < 1e-9);
}

TEST_CASE("bond perception distance rule") {
  // Two carbons at 0.15 nm: interval is [0.75, 1.25] * 0.152 = [0.114, 0.190].
  std::vector<Element> cc = {Element::kC, Element::kC};
  BondGraph g1 = perceive_bonds(coords_of({0, 0, 0, 0.15, 0, 0}), cc);
  REQUIRE(g1.edges.size() == 1);
  CHECK(g1.has_edge(0, 1));
  CHECK(g1.labels[0] == "C");

  // Far apart: no edge.
  BondGraph g2 = perceive_bonds(coords_of({0, 0, 0, 1.0, 0, 0}), cc);
  CHECK(g2.edges.empty());

  // Just inside and just outside the lower limit.
  BondGraph g3 = perceive_bonds(coords_of({0, 0, 0, 0.1141, 0, 0}), cc);
  CHECK(g3.edges.size() == 1);
  BondGraph g4 = perceive_bonds(coords_of({0, 0, 0, 0.1139, 0, 0}), cc);
  CHECK(g4.edges.empty());

  // C-H uses the mixed sum 0.076 + 0.031 = 0.107.
  std::vector<Element> ch = {Element::kC, Element::kH};
  BondGraph g5 = perceive_bonds(coords_of({0, 0, 0, 0.107, 0, 0}), ch);
  CHECK(g5.edges.size() == 1);
}

TEST_CASE("covalent radius table file loading") {
  const char* path = "radii_test.txt";
  {
    std::ofstream f(path);
    f << "# custom radii\n";
    f << "C 0.080\n";
    f << "\n";
    f << "S 0.110 # inline comment\n";
  }
  CovalentRadiusTable tab = load_covalent_radii(path);
  CHECK(tab.of(Element::kC) == doctest::Approx(0.080));
  CHECK(tab.of(Element::kS) == doctest::Approx(0.110));
  CHECK(tab.of(Element::kN) == doctest::Approx(0.071));  // untouched default

  {
    std::ofstream f(path);
    f << "C 0.080\nXx 0.1\n";
  }
  CHECK_THROWS_AS(load_covalent_radii(path), parse_error);
  std::remove(path);
}

TEST_CASE("graph match recovers hydrogen permutation") {
  Topology topo = methane_topology();
  BondGraph ref = reference_graph(topo);
  Coords x = methane_coords();
  std::vector<Element> els = {Element::kC, Element::kH, Element::kH, Element::kH, Element::kH};

  // Swap two hydrogens in storage order; the graphs stay isomorphic.
  Coords swapped = x;
  for (int k = 0; k < 3; ++k) std::swap(swapped[static_cast<size_t>(3 * 1 + k)], swapped[static_cast<size_t>(3 * 3 + k)]);
  BondGraph sample = perceive_bonds(swapped, els);
  MatchResult m = match_topology(sample, ref);
  REQUIRE(m.status == MatchStatus::kMatched);
  Coords back = reorder_coords(swapped, m.permutation);
  // Carbon slot must hold the carbon position; hydrogen slots must hold the
  // four hydrogen positions as a set.
  CHECK(back[0] == doctest::Approx(x[0]));
  // Deterministic: a second run returns the identical permutation.
  MatchResult m2 = match_topology(sample, ref);
  CHECK(m2.permutation == m.permutation);

  // Identity case maps carbon to slot 0.
  BondGraph sample_id = perceive_bonds(x, els);
  MatchResult mid = match_topology(sample_id, ref);
  REQUIRE(mid.status == MatchStatus::kMatched);
  CHECK(mid.permutation[0] == 0);
}

TEST_CASE("graph match detects a deleted edge") {
  Topology topo = methane_topology();
  BondGraph ref = reference_graph(topo);
  BondGraph broken = ref;
  broken.edges.pop_back();  // reference with one bond removed
  MatchResult m = match_topology(ref, broken);
  CHECK(m.status == MatchStatus::kMismatch);

  // Same counts but different labels also mismatch.
  BondGraph relabeled = ref;
  relabeled.labels[4] = "O";
  CHECK(match_topology(ref, relabeled).status == MatchStatus::kMismatch);
}

TEST_CASE("graph match distinguishes connectivity") {
  // Same label multiset and edge count, different connectivity: path vs star.
  BondGraph path;
  path.n = 4;
  path.labels = {"C", "C", "C", "C"};
  path.edges = {{0, 1}, {1, 2}, {2, 3}};
  BondGraph star;
  star.n = 4;
  star.labels = {"C", "C", "C", "C"};
  star.edges = {{0, 1}, {0, 2}, {0, 3}};
  CHECK(match_topology(path, star).status == MatchStatus::kMismatch);
  CHECK(match_topology(path, path).status == MatchStatus::kMatched);
}

TEST_CASE("graph match reports budget exhaustion") {
  // Uniformly labelled triangle: refinement cannot split anything, so the
  // search needs three assignments; a two-node budget must be reported as
  // exhausted rather than as a mismatch.
  BondGraph tri;
  tri.n = 3;
  tri.labels = {"C", "C", "C"};
  tri.edges = {{0, 1}, {0, 2}, {1, 2}};
  MatchResult m = match_topology(tri, tri, 2);
  CHECK(m.status == MatchStatus::kBudgetExhausted);
  MatchResult ok = match_topology(tri, tri, 1000);
  CHECK(ok.status == MatchStatus::kMatched);
  CHECK(ok.nodes_explored == 3);
}

TEST_CASE("chirality sign and outcomes") {
  Topology topo = chiral_topology();
  Coords x = chiral_coords();
  int s = chirality_sign(x, topo.chirals[0]);
  REQUIRE(s != 0);
  topo.chirals[0].ref_sign = s;

  CHECK(check_chirality(x, topo.chirals) == ChiralityOutcome::kCorrect);
  Coords mir = mirror_conformation(x);
  CHECK(chirality_sign(mir, topo.chirals[0]) == -s);
  CHECK(check_chirality(mir, topo.chirals) == ChiralityOutcome::kAllFlipped);

  // Distances are preserved by the reflection.
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      CHECK(distance(mir, i, j) == doctest::Approx(distance(x, i, j)));

  // Near-planar centre is indeterminate.
  Coords flat = x;
  for (int i = 0; i < 5; ++i) flat[static_cast<size_t>(3 * i + 2)] = 0.0;
  CHECK(chirality_sign(flat, topo.chirals[0]) == 0);
  CHECK(check_chirality(flat, topo.chirals) == ChiralityOutcome::kIndeterminate);

  // Empty list is trivially correct.
  CHECK(check_chirality(x, {}) == ChiralityOutcome::kCorrect);
}

TEST_CASE("validity pipeline accepts, repairs, rejects") {
  Topology topo = chiral_topology();
  Coords x = chiral_coords();
  topo.chirals[0].ref_sign = chirality_sign(x, topo.chirals[0]);

  SUBCASE("correct conformation is valid unchanged") {
    ValidityReport r = validate_conformation(x, topo);
    CHECK(r.valid);
    CHECK(r.match_status == MatchStatus::kMatched);
    CHECK_FALSE(r.mirrored);
    CHECK(r.chirality == ChiralityOutcome::kCorrect);
    REQUIRE(r.reordered.size() == x.size());
  }

  SUBCASE("mirror image is repaired by reflection") {
    ValidityReport r = validate_conformation(mirror_conformation(x), topo);
    CHECK(r.valid);
    CHECK(r.mirrored);
    CHECK(r.chirality == ChiralityOutcome::kCorrect);
    // The repaired conformation has the reference handedness.
    CHECK(chirality_sign(r.reordered, topo.chirals[0]) == topo.chirals[0].ref_sign);
  }

  SUBCASE("broken bond graph is invalid") {
    Coords far = x;
    far[3] += 1.0;  // push the nitrogen out of bonding range
    ValidityReport r = validate_conformation(far, topo);
    CHECK_FALSE(r.valid);
    CHECK(r.match_status == MatchStatus::kMismatch);
  }

  SUBCASE("two centres with one flipped is invalid") {
    // Two disjoint chiral fragments in one molecule.
    Topology two;
    two.name = "twocentres";
    for (int rep = 0; rep < 2; ++rep) {
      int base = 5 * rep;
      two.add_atom(Element::kC, "MOL", rep + 1, "CA");
      two.add_atom(Element::kN, "MOL", rep + 1, "N");
      two.add_atom(Element::kO, "MOL", rep + 1, "O");
      two.add_atom(Element::kS, "MOL", rep + 1, "S");
      two.add_atom(Element::kH, "MOL", rep + 1, "HA");
      for (int k = 1; k <= 4; ++k) two.add_bond(base, base + k);
      ChiralCenter c;
      c.center = base;
      c.substituents = {base + 1, base + 2, base + 3, base + 4};
      two.chirals.push_back(c);
    }
    // Link the two fragments so the molecule is connected: S-S bridge.
    two.add_bond(3, 8);

    Coords both(30, 0.0);
    Coords one = chiral_coords();
    for (int i = 0; i < 5; ++i)
      for (int k = 0; k < 3; ++k) both[static_cast<size_t>(3 * i + k)] = one[static_cast<size_t>(3 * i + k)];
    // Second copy translated along +x so the S atoms sit near 0.205 nm
    // (inside the S-S bond window [0.1575, 0.2625]) and mirrored in y to
    // keep every other cross-fragment pair out of bonding range.
    for (int i = 0; i < 5; ++i) {
      both[static_cast<size_t>(3 * (i + 5) + 0)] = -one[static_cast<size_t>(3 * i + 0)] - 2.0 * 0.1045 - 0.205;
      both[static_cast<size_t>(3 * (i + 5) + 1)] = one[static_cast<size_t>(3 * i + 1)];
      both[static_cast<size_t>(3 * (i + 5) + 2)] = one[static_cast<size_t>(3 * i + 2)];
    }
    two.chirals[0].ref_sign = chirality_sign(both, two.chirals[0]);
    two.chirals[1].ref_sign = chirality_sign(both, two.chirals[1]);
    REQUIRE(two.chirals[0].ref_sign != 0);
    REQUIRE(two.chirals[1].ref_sign != 0);

    // Sanity: the doubled molecule is valid as built.
    ValidityReport ok = validate_conformation(both, two);
    REQUIRE(ok.valid);

    // Flip only the second centre: reflect fragment two in z about the plane
    // through its own sulfur. The reflection is an isometry (intra-fragment
    // bonds survive) and leaves the bridging sulfur in place (the S-S bond
    // survives), but inverts the fragment's handedness.
    Coords half_flipped = both;
    const double plane_z = both[static_cast<size_t>(3 * 8 + 2)];
    for (int i = 5; i < 10; ++i)
      half_flipped[static_cast<size_t>(3 * i + 2)] = 2 * plane_z - both[static_cast<size_t>(3 * i + 2)];
    ValidityReport r = validate_conformation(half_flipped, two);
    CHECK_FALSE(r.valid);
    CHECK(r.match_status == MatchStatus::kMatched);
    CHECK(r.chirality == ChiralityOutcome::kMixed);
  }
}
