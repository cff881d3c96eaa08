//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_MOLKIT_ISOMORPHISM_HPP
#define TBG_MOLKIT_ISOMORPHISM_HPP

#include <cstdint>
#include <vector>

#include "tbg/molkit/bonds.hpp"

namespace tbg::molkit {

enum class MatchStatus { kMatched, kMismatch, kBudgetExhausted };

struct MatchResult {
  MatchStatus status = MatchStatus::kMismatch;
  // permutation[i] = reference slot of sample atom i (valid when matched)
  std::vector<int> permutation;
  std::int64_t nodes_explored = 0;
};

// Label-preserving graph isomorphism between a perceived sample graph and
// the reference topology graph. Candidate classes are narrowed by iterated
// partition refinement over (label, degree, neighbor-class multiset); the
// remaining ambiguity (automorphisms of equivalent atoms, e.g. methyl
// hydrogens) is resolved by backtracking that always takes the
// lowest-index branch first, so the returned permutation is deterministic.
// The search explores at most `budget` nodes; hitting the budget is reported
// as its own status rather than silently treated as a mismatch.
MatchResult match_topology(const BondGraph& sample, const BondGraph& reference,
                           std::int64_t budget = 1000000);

// Applies a match permutation: result slot permutation[i] receives sample
// atom i's coordinates.
Coords reorder_coords(const Coords& x, const std::vector<int>& permutation);

}  // namespace tbg::molkit

#endif  // TBG_MOLKIT_ISOMORPHISM_HPP
