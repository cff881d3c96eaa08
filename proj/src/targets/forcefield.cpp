//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/targets/forcefield.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tbg::targets {

void ToyForceField::validate() const {
  auto check_index = [&](int i, const char* what) {
    if (i < 0 || i >= n_atoms)
      throw contract_error(std::string("ToyForceField: ") + what + " index out of range");
  };
  for (const auto& b : bonds) {
    check_index(b.i, "bond");
    check_index(b.j, "bond");
    if (b.i == b.j || b.k <= 0.0 || b.r0 <= 0.0) throw contract_error("ToyForceField: bad bond term");
  }
  for (const auto& a : angles) {
    check_index(a.i, "angle");
    check_index(a.j, "angle");
    check_index(a.k, "angle");
    if (a.stiffness <= 0.0) throw contract_error("ToyForceField: bad angle term");
  }
  for (const auto& t : torsions) {
    check_index(t.i, "torsion");
    check_index(t.j, "torsion");
    check_index(t.k, "torsion");
    check_index(t.l, "torsion");
    if (t.barrier < 0.0 || t.period < 1) throw contract_error("ToyForceField: bad torsion term");
  }
  if (lj_enabled) {
    if (atom_class.size() != static_cast<size_t>(n_atoms))
      throw contract_error("ToyForceField: atom_class size mismatch");
    // Every 1-2 and 1-3 pair along the bond terms must be excluded.
    ToyForceField tmp = *this;
    tmp.derive_exclusions();
    std::set<std::pair<int, int>> have(lj_exclusions.begin(), lj_exclusions.end());
    for (const auto& p : tmp.lj_exclusions)
      if (!have.count(p))
        throw contract_error("ToyForceField: missing 1-2/1-3 LJ exclusion");
  }
}

void ToyForceField::derive_exclusions() {
  std::set<std::pair<int, int>> excl;
  std::vector<std::vector<int>> adj(static_cast<size_t>(n_atoms));
  for (const auto& b : bonds) {
    excl.emplace(std::min(b.i, b.j), std::max(b.i, b.j));
    adj[static_cast<size_t>(b.i)].push_back(b.j);
    adj[static_cast<size_t>(b.j)].push_back(b.i);
  }
  for (int j = 0; j < n_atoms; ++j)
    for (int a : adj[static_cast<size_t>(j)])
      for (int b : adj[static_cast<size_t>(j)])
        if (a < b) excl.emplace(a, b);
  lj_exclusions.assign(excl.begin(), excl.end());
}

double ToyForceField::bonded_energy(const double* x) const {
  ToyForceField copy = *this;
  copy.lj_enabled = false;
  return copy.raw_energy(x);
}

MoleculeTarget::MoleculeTarget(molkit::Topology topology, ToyForceField ff)
    : topo_(std::move(topology)), ff_(std::move(ff)) {
  if (topo_.n_atoms() != ff_.n_atoms)
    throw contract_error("MoleculeTarget: topology/force-field atom count mismatch");
  if (ff_.temperature <= 0.0) throw contract_error("MoleculeTarget: temperature must be positive");
  ff_.validate();
}

double MoleculeTarget::energy(const double* x) const {
  return sanitize_energy(ff_.raw_energy(x) / ff_.temperature, ff_.energy_cap);
}

void MoleculeTarget::gradient(const double* x, double* g) const {
  const int n = dim();
  std::vector<numcore::Dual> xd(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) xd[static_cast<size_t>(i)] = numcore::Dual{x[i], 0.0};
  for (int i = 0; i < n; ++i) {
    xd[static_cast<size_t>(i)].d = 1.0;
    g[i] = ff_.raw_energy(xd.data()).d / ff_.temperature;
    xd[static_cast<size_t>(i)].d = 0.0;
  }
}

}  // namespace tbg::targets
