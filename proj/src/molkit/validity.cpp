//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/molkit/validity.hpp"

namespace tbg::molkit {

ValidityReport validate_conformation(const Coords& x, const Topology& topo,
                                     const CovalentRadiusTable& radii) {
  ValidityReport rep;
  if (x.size() != static_cast<size_t>(3 * topo.n_atoms()))
    throw contract_error("validate_conformation: coordinate count does not match topology");

  std::vector<Element> elements(topo.atoms.size());
  for (size_t i = 0; i < topo.atoms.size(); ++i) elements[i] = topo.atoms[i].element;

  BondGraph sample = perceive_bonds(x, elements, radii);
  BondGraph reference = reference_graph(topo);
  MatchResult match = match_topology(sample, reference);
  rep.match_status = match.status;
  if (match.status != MatchStatus::kMatched) return rep;

  rep.permutation = match.permutation;
  rep.reordered = reorder_coords(x, match.permutation);

  rep.chirality = check_chirality(rep.reordered, topo.chirals);
  if (rep.chirality == ChiralityOutcome::kAllFlipped) {
    // Mirror image: reflect and re-check. Distances are preserved, so the
    // bond graph and the match are unaffected.
    rep.reordered = mirror_conformation(rep.reordered);
    rep.mirrored = true;
    rep.chirality = check_chirality(rep.reordered, topo.chirals);
  }
  rep.valid = rep.chirality == ChiralityOutcome::kCorrect;
  return rep;
}

}  // namespace tbg::molkit
