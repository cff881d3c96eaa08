//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_TARGETS_FORCEFIELD_HPP
#define TBG_TARGETS_FORCEFIELD_HPP

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tbg/molkit/geometry.hpp"
#include "tbg/molkit/topology.hpp"
#include "tbg/numcore/dual.hpp"
#include "tbg/targets/target.hpp"

namespace tbg::targets {

struct BondTerm {
  int i = -1, j = -1;
  double r0 = 0.0, k = 0.0;  // U = k/2 (r - r0)^2
};

struct AngleTerm {
  int i = -1, j = -1, k = -1;  // angle at j
  double theta0 = 0.0, stiffness = 0.0;  // U = k/2 (theta - theta0)^2
};

struct TorsionTerm {
  int i = -1, j = -1, k = -1, l = -1;
  double barrier = 0.0;  // U = barrier * (1 + cos(period*phi - phase))
  int period = 1;
  double phase = 0.0;
};

struct LJClassParam {
  std::string atom_class;
  double sigma = 0.3, epsilon = 0.1;
};

// Small classical force field: harmonic bonds and angles, periodic torsions,
// optional Lennard-Jones between non-excluded pairs (1-2 and 1-3 excluded).
// All parameters are in reduced units; energies come out in k_BT after
// division by `temperature`.
struct ToyForceField {
  std::string name;
  int n_atoms = 0;
  double temperature = 1.0;
  double energy_cap = 1e6;  // k_BT saturation for finite overflows

  std::vector<BondTerm> bonds;
  std::vector<AngleTerm> angles;
  std::vector<TorsionTerm> torsions;

  bool lj_enabled = false;
  std::vector<std::string> atom_class;            // per atom, for LJ lookup
  std::vector<LJClassParam> lj_params;
  std::vector<std::pair<int, int>> lj_exclusions;  // normalized i < j

  // Index bounds, positive stiffness, exclusion consistency (every 1-2 and
  // 1-3 pair along the bond terms must be excluded when LJ is on).
  void validate() const;
  // Fill lj_exclusions with all 1-2 and 1-3 pairs derived from bond terms.
  void derive_exclusions();

  // Raw potential in reduced units (no cap, no temperature division);
  // templated so the same code serves values and forward-mode derivatives.
  template <typename S>
  S raw_energy(const S* x) const;

  double bonded_energy(const double* x) const;  // raw, bonded terms only
};

// Boltzmann target over a molecule: U(x) = raw_energy(x) / T, capped.
class MoleculeTarget : public BoltzmannTarget {
 public:
  MoleculeTarget(molkit::Topology topology, ToyForceField ff);

  std::string name() const override { return ff_.name; }
  int dim() const override { return 3 * ff_.n_atoms; }
  double energy(const double* x) const override;
  void gradient(const double* x, double* g) const override;
  double temperature() const override { return ff_.temperature; }

  const molkit::Topology& topology() const { return topo_; }
  const ToyForceField& force_field() const { return ff_; }

 private:
  molkit::Topology topo_;
  ToyForceField ff_;
};

// ---- implementation of the templated kernel ----

template <typename S>
S ToyForceField::raw_energy(const S* x) const {
  using numcore::cos;
  S u{0.0};
  for (const auto& b : bonds) {
    const S d = molkit::distance_t(x, b.i, b.j) - b.r0;
    u += 0.5 * b.k * d * d;
  }
  for (const auto& a : angles) {
    const S d = molkit::angle_t(x, a.i, a.j, a.k) - a.theta0;
    u += 0.5 * a.stiffness * d * d;
  }
  for (const auto& t : torsions) {
    const S phi = molkit::torsion_t(x, t.i, t.j, t.k, t.l);
    u += t.barrier * (1.0 + cos(static_cast<double>(t.period) * phi - t.phase));
  }
  if (lj_enabled) {
    std::set<std::pair<int, int>> excl(lj_exclusions.begin(), lj_exclusions.end());
    for (int i = 0; i < n_atoms; ++i) {
      for (int j = i + 1; j < n_atoms; ++j) {
        if (excl.count({i, j})) continue;
        // Lorentz-Berthelot mixing over the per-class parameters.
        const LJClassParam* a = nullptr;
        const LJClassParam* b = nullptr;
        for (const auto& p : lj_params) {
          if (p.atom_class == atom_class[static_cast<size_t>(i)]) a = &p;
          if (p.atom_class == atom_class[static_cast<size_t>(j)]) b = &p;
        }
        if (!a || !b) throw contract_error("ToyForceField: missing LJ class parameters");
        const double sigma = 0.5 * (a->sigma + b->sigma);
        const double eps = std::sqrt(a->epsilon * b->epsilon);
        const S d = molkit::distance_t(x, i, j);
        const S s2 = (sigma / d) * (sigma / d);
        const S s6 = s2 * s2 * s2;
        u += 4.0 * eps * (s6 * s6 - s6);
      }
    }
  }
  return u;
}

}  // namespace tbg::targets

#endif  // TBG_TARGETS_FORCEFIELD_HPP
