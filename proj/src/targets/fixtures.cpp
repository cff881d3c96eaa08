//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/targets/fixtures.hpp"

#include <cctype>
#include <cmath>

#include "tbg/molkit/chirality.hpp"
#include "tbg/numcore/rng.hpp"

namespace tbg::targets {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Shared stiffnesses (reduced units).
constexpr double kBondK = 50000.0;   // sigma_r ~ 0.0045 nm
constexpr double kAngleK = 200.0;    // sigma_theta ~ 0.07 rad
// Substituent-azimuth pins. These must be stiff enough that thermal wobble
// never drags a geminal 1-3 pair inside the bond-perception window (the
// tightest margin, CB..C around an alpha carbon, is ~0.06 nm with a
// sensitivity of ~0.07 nm/rad, so sigma ~ 0.13 rad keeps excursions at the
// 6-sigma level); the rotatable-torsion statistics are unaffected because
// every torsion coordinate is an independent factor of the density.
constexpr double kFixK = 150.0;  // sigma ~ 0.08 rad
constexpr double kMidK = 24.0;   // sigma ~ 0.20 rad, anti pins (second-order safe)

// Rest bond lengths (nm). Every rest length must sit at least ~5.5 bond
// sigmas above the lower perception edge 0.75*(r_i + r_j) so that thermal
// stretching never deletes an edge from the perceived graph.
constexpr double kNCa = 0.147, kCaC = 0.152, kCN = 0.136, kCO = 0.1245;
constexpr double kNH = 0.102, kCH = 0.109;
// Carbonyl stretch is about twice as stiff as a single bond.
constexpr double kCOK = 100000.0;  // sigma_r ~ 0.0032 nm

struct RowSpec {
  int atom = -1, rb = -1, ra = -1, rt = -1;
  double r0 = 0.0, kb = kBondK;
  double th0 = -1.0, ka = kAngleK;
  std::vector<CosTerm> tors;
  double rest_torsion = 0.0;
};

// Single-well torsion pinned at `rest`: k*(1 + cos(phi - rest + pi)),
// which is zero exactly at the rest value.
std::vector<CosTerm> pinned(double rest, double k) {
  return {CosTerm{k, 1, rest - kPi}};
}

// Double well with minima at a (shallow, 2*k1) and a - pi (deep, 0).
std::vector<CosTerm> double_well(double k1, double k2, double a) {
  return {CosTerm{k1, 1, a}, CosTerm{k2, 2, 2.0 * a - kPi}};
}

void assemble(MoleculeFixture& fx, const std::vector<RowSpec>& rows) {
  for (const auto& r : rows) {
    molkit::ZEntry z;
    z.atom = r.atom;
    z.ref_bond = r.rb;
    z.ref_angle = r.ra;
    z.ref_torsion = r.rt;
    z.bond = r.r0;
    z.angle = r.th0 >= 0 ? r.th0 : 0.0;
    z.torsion = r.rest_torsion;
    fx.zmatrix.push_back(z);

    RowPotential p;
    p.r0 = r.r0;
    p.k_bond = r.kb;
    fx.ff.bonds.push_back(BondTerm{r.atom, r.rb, r.r0, r.kb});
    if (r.ra >= 0) {
      p.theta0 = r.th0;
      p.k_angle = r.ka;
      fx.ff.angles.push_back(AngleTerm{r.atom, r.rb, r.ra, r.th0, r.ka});
    }
    if (r.rt >= 0) {
      p.torsion_terms = r.tors;
      for (const auto& t : r.tors)
        fx.ff.torsions.push_back(TorsionTerm{r.atom, r.rb, r.ra, r.rt, t.barrier, t.period, t.phase});
    }
    fx.row_potentials.push_back(std::move(p));
  }
  fx.ff.n_atoms = fx.topology.n_atoms();
  fx.ff.validate();
  fx.rest = molkit::build_from_internal(fx.topology.n_atoms(), fx.zmatrix);
}

struct ResidueParams {
  molkit::Element cb_element;
  double cb_r0;
  double phi_a, phi_k1;  // used when the residue sits at position 2
  double psi_a, psi_k1;  // used when the residue sits at position 1
};

// Well centers are chosen so that every sampled torsion region stays clear
// of the eclipsed geometries where a nonbonded pair could wander inside the
// bond-perception window (the C2/CB2 eclipses of the carbonyl live near
// phi = 0 and phi = +2.09 with the beta-carbon on the -2.09 azimuth).
ResidueParams residue_params(ResidueKind r) {
  switch (r) {
    case ResidueKind::kAla:
      return {molkit::Element::kC, 0.152, 1.10, 1.25, 2.0, 1.0};
    case ResidueKind::kSer:
      return {molkit::Element::kO, 0.142, 0.85, 0.90, 1.6, 0.9};
    case ResidueKind::kCys:
      return {molkit::Element::kS, 0.181, 1.30, 1.60, 2.4, 1.1};
  }
  throw contract_error("residue_params: unknown residue kind");
}

constexpr double kPhiK2 = 4.5, kPsiK2 = 4.0;

double sample_bond_length(numcore::Rng& rng, double r0, double k) {
  // Density ~ r^2 exp(-k/2 (r - r0)^2), truncated to r0 +- 8 sigma (tail
  // mass below double precision). Rejection from N(r0, sigma), ratio bound
  // (r0 + 8 sigma)^2.
  const double sigma = 1.0 / std::sqrt(k);
  const double hi = r0 + 8.0 * sigma;
  const double lo = std::max(r0 - 8.0 * sigma, 1e-9);
  const double bound = hi * hi;
  for (;;) {
    const double r = r0 + sigma * rng.normal();
    if (r < lo || r > hi) continue;
    if (rng.uniform() < r * r / bound) return r;
  }
}

double sample_angle_value(numcore::Rng& rng, double theta0, double k) {
  // Density ~ sin(theta) exp(-k/2 (theta - theta0)^2) on (0, pi).
  const double sigma = 1.0 / std::sqrt(k);
  for (;;) {
    const double th = theta0 + sigma * rng.normal();
    if (th <= 0.0 || th >= kPi) continue;
    if (rng.uniform() < std::sin(th)) return th;
  }
}

double sample_torsion_value(numcore::Rng& rng, const RowPotential& row,
                            const TorsionBias* bias) {
  if (row.torsion_terms.empty() && !bias) return rng.uniform(-kPi, kPi);
  // The cosine-sum potential is >= 0, so exp(-U) <= 1; with a bias the
  // acceptance ratio is bounded by its supremum.
  const double bound = bias ? bias->bound : 1.0;
  if (bound <= 0.0) throw contract_error("sample_conformations: bias bound must be positive");
  for (;;) {
    const double phi = rng.uniform(-kPi, kPi);
    double w = std::exp(-row.torsion_potential(phi));
    if (bias) w *= bias->omega(phi) / bound;
    if (w > 1.0 + 1e-12) throw contract_error("sample_conformations: bias bound violated");
    if (rng.uniform() < w) return phi;
  }
}

}  // namespace

const char* residue_name(ResidueKind r) {
  switch (r) {
    case ResidueKind::kAla: return "ALA";
    case ResidueKind::kSer: return "SER";
    case ResidueKind::kCys: return "CYS";
  }
  throw contract_error("residue_name: unknown residue kind");
}

ResidueKind residue_from_name(const std::string& name) {
  if (name == "ALA") return ResidueKind::kAla;
  if (name == "SER") return ResidueKind::kSer;
  if (name == "CYS") return ResidueKind::kCys;
  throw contract_error("residue_from_name: unknown residue " + name);
}

double RowPotential::torsion_potential(double phi) const {
  double u = 0.0;
  for (const auto& t : torsion_terms)
    u += t.barrier * (1.0 + std::cos(t.period * phi - t.phase));
  return u;
}

TorsionDoubleWell MoleculeFixture::phi_marginal() const {
  if (phi_row < 0) throw contract_error("fixture has no phi torsion");
  return TorsionDoubleWell(phi_k1, phi_k2, phi_a);
}

TorsionDoubleWell MoleculeFixture::psi_marginal() const {
  if (psi_row < 0) throw contract_error("fixture has no psi torsion");
  return TorsionDoubleWell(psi_k1, psi_k2, psi_a);
}

MoleculeFixture double_well_molecule() {
  MoleculeFixture fx;
  fx.topology.name = "dbw4";
  for (int i = 0; i < 4; ++i)
    fx.topology.add_atom(molkit::Element::kC, "DBW", 1, "C" + std::to_string(i + 1));
  fx.topology.add_bond(0, 1);
  fx.topology.add_bond(1, 2);
  fx.topology.add_bond(2, 3);
  fx.ff.name = "dbw4";

  fx.phi_k1 = 1.25;
  fx.phi_k2 = 3.0;
  fx.phi_a = 1.0;
  std::vector<RowSpec> rows = {
      {1, 0, -1, -1, kCaC},
      {2, 1, 0, -1, kCaC, kBondK, 1.911},
      {3, 2, 1, 0, kCaC, kBondK, 1.911, kAngleK,
       double_well(fx.phi_k1, fx.phi_k2, fx.phi_a), fx.phi_a - kPi},
  };
  assemble(fx, rows);
  fx.phi_row = 2;
  fx.phi_atoms = {0, 1, 2, 3};
  return fx;
}

MoleculeFixture transfer_peptide(ResidueKind r1, ResidueKind r2) {
  const ResidueParams p1 = residue_params(r1);
  const ResidueParams p2 = residue_params(r2);

  MoleculeFixture fx;
  std::string tag = std::string("dipeptide-") + residue_name(r1) + "-" + residue_name(r2);
  for (char& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  fx.topology.name = tag;
  fx.ff.name = tag;

  using molkit::Element;
  const std::string R1 = residue_name(r1), R2 = residue_name(r2);
  // A linked pair of residues: an amine-capped alpha carbon with its side
  // chain, an amide link, a second alpha carbon, and a terminal carbonyl.
  // The first residue carries no carbonyl oxygen of its own: that oxygen
  // would point into the second side chain's swing radius, and with a purely
  // torsional energy (no steric repulsion) the sampler would occasionally
  // realize those contacts.
  // index, element, residue, position, atom name
  fx.topology.add_atom(Element::kN, R1, 1, "N");    // 0
  fx.topology.add_atom(Element::kH, R1, 1, "HN");   // 1
  fx.topology.add_atom(Element::kC, R1, 1, "CA");   // 2
  fx.topology.add_atom(Element::kH, R1, 1, "HA");   // 3
  fx.topology.add_atom(p1.cb_element, R1, 1, "CB"); // 4
  fx.topology.add_atom(Element::kC, R1, 1, "C");    // 5
  fx.topology.add_atom(Element::kN, R2, 2, "N");    // 6
  fx.topology.add_atom(Element::kC, R2, 2, "CA");   // 7
  fx.topology.add_atom(Element::kH, R2, 2, "HA");   // 8
  fx.topology.add_atom(p2.cb_element, R2, 2, "CB"); // 9
  fx.topology.add_atom(Element::kC, R2, 2, "C");    // 10
  fx.topology.add_atom(Element::kO, R2, 2, "O");    // 11
  const std::vector<std::pair<int, int>> bonds = {{0, 1}, {0, 2}, {2, 3}, {2, 4}, {2, 5},
                                                  {5, 6}, {6, 7}, {7, 8}, {7, 9},
                                                  {7, 10}, {10, 11}};
  for (auto [i, j] : bonds) fx.topology.add_bond(i, j);

  fx.psi_k1 = p1.psi_k1;
  fx.psi_k2 = kPsiK2;
  fx.psi_a = p1.psi_a;
  fx.phi_k1 = p2.phi_k1;
  fx.phi_k2 = kPhiK2;
  fx.phi_a = p2.phi_a;

  const double tet = 1.911;  // tetrahedral
  std::vector<RowSpec> rows = {
      // atom, bond-ref, angle-ref, torsion-ref, r0, kb, theta0, ka, torsion terms, rest
      {2, 0, -1, -1, kNCa},                                                   // CA1
      {5, 2, 0, -1, kCaC, kBondK, tet},                                       // C1
      {1, 0, 2, 5, kNH, kBondK, 2.0, kAngleK, pinned(kPi, kMidK), kPi},       // HN
      {3, 2, 0, 5, kCH, kBondK, tet, kAngleK, pinned(2.094, kFixK), 2.094},   // HA1
      {4, 2, 0, 5, p1.cb_r0, kBondK, tet, kAngleK, pinned(-2.094, kFixK), -2.094},  // CB1
      {6, 5, 2, 0, kCN, kBondK, 2.04, kAngleK,
       double_well(fx.psi_k1, fx.psi_k2, fx.psi_a), fx.psi_a - kPi},          // N2 (psi)
      {7, 6, 5, 2, kNCa, kBondK, 2.1, kAngleK, pinned(kPi, kFixK), kPi},      // CA2 (omega)
      {10, 7, 6, 5, kCaC, kBondK, tet, kAngleK,
       double_well(fx.phi_k1, fx.phi_k2, fx.phi_a), fx.phi_a - kPi},          // C2 (phi)
      {8, 7, 6, 10, kCH, kBondK, tet, kAngleK, pinned(2.094, kFixK), 2.094},     // HA2
      {9, 7, 6, 10, p2.cb_r0, kBondK, tet, kAngleK, pinned(-2.094, kFixK), -2.094},  // CB2
      {11, 10, 7, 6, kCO, kCOK, 2.094, kAngleK, pinned(kPi, kMidK), kPi},     // O2
  };
  assemble(fx, rows);
  fx.psi_row = 5;
  fx.psi_atoms = {0, 2, 5, 6};   // N1-CA1-C1-N2
  fx.phi_row = 7;
  fx.phi_atoms = {5, 6, 7, 10};  // C1-N2-CA2-C2

  // Chiral centers at both alpha carbons; reference signs from the rest
  // geometry itself.
  molkit::ChiralCenter c1;
  c1.center = 2;
  c1.substituents = {0, 4, 5, 3};  // N, CB, C, HA
  molkit::ChiralCenter c2;
  c2.center = 7;
  c2.substituents = {6, 9, 10, 8};
  c1.ref_sign = molkit::chirality_sign(fx.rest, c1);
  c2.ref_sign = molkit::chirality_sign(fx.rest, c2);
  if (c1.ref_sign == 0 || c2.ref_sign == 0)
    throw contract_error("transfer_peptide: degenerate rest chirality");
  fx.topology.chirals = {c1, c2};
  return fx;
}

MoleculeFixture toy_dipeptide() { return transfer_peptide(ResidueKind::kAla, ResidueKind::kAla); }

SampleBlock sample_conformations(const MoleculeFixture& fx, long count, std::uint64_t seed,
                                 const TorsionBias* phi_bias) {
  if (count < 0) throw contract_error("sample_conformations: negative count");
  const int n = fx.topology.n_atoms();
  SampleBlock out;
  out.dim = 3 * n;
  out.reserve_rows(count);
  std::vector<molkit::ZEntry> rows = fx.zmatrix;
  for (long s = 0; s < count; ++s) {
    numcore::Rng rng = numcore::Rng::stream(seed, static_cast<std::uint64_t>(s));
    for (size_t r = 0; r < rows.size(); ++r) {
      const RowPotential& pot = fx.row_potentials[r];
      rows[r].bond = sample_bond_length(rng, pot.r0, pot.k_bond);
      if (rows[r].ref_angle >= 0)
        rows[r].angle = sample_angle_value(rng, pot.theta0, pot.k_angle);
      if (rows[r].ref_torsion >= 0) {
        const TorsionBias* bias = (static_cast<int>(r) == fx.phi_row) ? phi_bias : nullptr;
        rows[r].torsion = sample_torsion_value(rng, pot, bias);
      }
    }
    molkit::Coords x = molkit::build_from_internal(n, rows);
    out.push(x.data());
  }
  return out;
}

}  // namespace tbg::targets
