//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_MOLKIT_CHIRALITY_HPP
#define TBG_MOLKIT_CHIRALITY_HPP

#include <vector>

#include "tbg/molkit/topology.hpp"

namespace tbg::molkit {

enum class ChiralityOutcome { kCorrect, kAllFlipped, kMixed, kIndeterminate };

// Handedness of one centre: sign of det[s2-s1, s3-s1, s4-s1] over the four
// substituent positions in priority order. Returns +1 or -1; returns 0 when
// |det| < 1e-9 nm^3 (near-planar arrangement, orientation indeterminate).
int chirality_sign(const Coords& x, const ChiralCenter& c);

// Compares every centre's sign against its reference sign. A molecule with
// no declared centres is trivially correct. Any indeterminate centre makes
// the whole outcome indeterminate.
ChiralityOutcome check_chirality(const Coords& x, const std::vector<ChiralCenter>& centers);

// Reflection through the yz plane (negates every x component). Inverts the
// handedness of every centre while preserving all distances.
Coords mirror_conformation(const Coords& x);

}  // namespace tbg::molkit

#endif  // TBG_MOLKIT_CHIRALITY_HPP
