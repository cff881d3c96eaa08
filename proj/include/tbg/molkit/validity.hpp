//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_MOLKIT_VALIDITY_HPP
#define TBG_MOLKIT_VALIDITY_HPP

#include <vector>

#include "tbg/molkit/bonds.hpp"
#include "tbg/molkit/chirality.hpp"
#include "tbg/molkit/isomorphism.hpp"
#include "tbg/molkit/topology.hpp"

namespace tbg::molkit {

struct ValidityReport {
  bool valid = false;
  MatchStatus match_status = MatchStatus::kMismatch;
  ChiralityOutcome chirality = ChiralityOutcome::kIndeterminate;
  bool mirrored = false;
  std::vector<int> permutation;  // sample atom i -> reference slot
  Coords reordered;              // coords in reference order (mirrored if applied)
};

// Full conformation check against a reference topology:
//   1. perceive bonds from distances,
//   2. match the perceived graph onto the reference graph (element labels),
//   3. bring coordinates into reference atom order,
//   4. check every chiral centre; a conformation with *all* centres inverted
//      is the mirror image and is repaired by reflection, anything partial
//      or degenerate is invalid.
// `reordered` holds the usable conformation whenever `valid` is true.
ValidityReport validate_conformation(const Coords& x, const Topology& topo,
                                     const CovalentRadiusTable& radii = CovalentRadiusTable{});

}  // namespace tbg::molkit

#endif  // TBG_MOLKIT_VALIDITY_HPP
