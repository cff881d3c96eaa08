//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_TARGETS_FIXTURES_HPP
#define TBG_TARGETS_FIXTURES_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tbg/molkit/geometry.hpp"
#include "tbg/molkit/topology.hpp"
#include "tbg/targets/forcefield.hpp"
#include "tbg/targets/torsionwell.hpp"

namespace tbg::targets {

enum class ResidueKind { kAla, kSer, kCys };
const char* residue_name(ResidueKind r);
ResidueKind residue_from_name(const std::string& name);

// One cosine term of a per-row torsion potential.
struct CosTerm {
  double barrier = 0.0;
  int period = 1;
  double phase = 0.0;
};

// The 1-D densities attached to one z-matrix row (present fields depend on
// whether the row has an angle/torsion reference).
struct RowPotential {
  double r0 = 0.0, k_bond = 0.0;
  double theta0 = -1.0, k_angle = 0.0;
  std::vector<CosTerm> torsion_terms;

  double torsion_potential(double phi) const;
};

// A benchmark molecule whose force field attaches every term to exactly one
// z-matrix coordinate and ships without nonbonded terms. The Boltzmann
// distribution then factorizes over internal coordinates, so conformations
// can be drawn i.i.d. and the phi/psi torsion marginals are exactly
// proportional to exp(-U_torsion) — which is what makes the 1-D quadrature
// oracles exact.
struct MoleculeFixture {
  molkit::Topology topology;
  ToyForceField ff;
  std::vector<molkit::ZEntry> zmatrix;        // placement rows, atoms beyond 0
  std::vector<RowPotential> row_potentials;   // parallel to zmatrix
  int phi_row = -1, psi_row = -1;             // rows carrying the physical torsions
  std::array<int, 4> phi_atoms{{-1, -1, -1, -1}};
  std::array<int, 4> psi_atoms{{-1, -1, -1, -1}};
  double phi_k1 = 0, phi_k2 = 0, phi_a = 0;
  double psi_k1 = 0, psi_k2 = 0, psi_a = 0;
  molkit::Coords rest;

  MoleculeTarget target() const { return MoleculeTarget(topology, ff); }
  // The exact 1-D marginal of the phi (resp. psi) torsion.
  TorsionDoubleWell phi_marginal() const;
  TorsionDoubleWell psi_marginal() const;
};

// Four-atom carbon chain with a single double-well torsion (the smallest
// molecule exercising the full free-energy pipeline).
MoleculeFixture double_well_molecule();

// Twelve-atom capless two-residue peptide HN-N-CA(HA)(CB)-C-N-CA(HA)(CB)-C(=O).
// Residue kinds set the CB element (ALA: C, SER: O, CYS: S) and the phi/psi
// well parameters. Two chiral centers (both CA atoms). The refinement colors
// of all twelve atoms are distinct, so the only graph automorphism is the
// identity.
MoleculeFixture transfer_peptide(ResidueKind r1, ResidueKind r2);

// Canonical desk-scale dipeptide: transfer_peptide(ALA, ALA).
MoleculeFixture toy_dipeptide();

// Multiplicative bias on the phi torsion density, with an upper bound for
// rejection sampling.
struct TorsionBias {
  std::function<double(double)> omega;
  double bound = 1.0;
};

// Exact i.i.d. Boltzmann conformations via the decoupled internal-coordinate
// factorization (per-sample counter-based RNG streams: sample s depends only
// on (seed, s)). With a bias, the phi torsion is drawn from
// omega(phi)*exp(-U_phi) instead; everything else is unchanged.
SampleBlock sample_conformations(const MoleculeFixture& fx, long count, std::uint64_t seed,
                                 const TorsionBias* phi_bias = nullptr);

}  // namespace tbg::targets

#endif  // TBG_TARGETS_FIXTURES_HPP
