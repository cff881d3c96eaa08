//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/molkit/chirality.hpp"

#include <cmath>

namespace tbg::molkit {

namespace {
constexpr double kIndeterminateVolume = 1e-9;  // nm^3
}

int chirality_sign(const Coords& x, const ChiralCenter& c) {
  const double* s1 = atom_xyz(x, c.substituents[0]);
  const double* s2 = atom_xyz(x, c.substituents[1]);
  const double* s3 = atom_xyz(x, c.substituents[2]);
  const double* s4 = atom_xyz(x, c.substituents[3]);
  double a[3], b[3], d[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = s2[k] - s1[k];
    b[k] = s3[k] - s1[k];
    d[k] = s4[k] - s1[k];
  }
  double det = a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0]) +
               a[2] * (b[0] * d[1] - b[1] * d[0]);
  if (std::fabs(det) < kIndeterminateVolume) return 0;
  return det > 0.0 ? 1 : -1;
}

ChiralityOutcome check_chirality(const Coords& x, const std::vector<ChiralCenter>& centers) {
  if (centers.empty()) return ChiralityOutcome::kCorrect;
  int n_match = 0, n_flip = 0;
  for (const auto& c : centers) {
    int s = chirality_sign(x, c);
    if (s == 0) return ChiralityOutcome::kIndeterminate;
    if (s == c.ref_sign)
      ++n_match;
    else
      ++n_flip;
  }
  if (n_flip == 0) return ChiralityOutcome::kCorrect;
  if (n_match == 0) return ChiralityOutcome::kAllFlipped;
  return ChiralityOutcome::kMixed;
}

Coords mirror_conformation(const Coords& x) {
  Coords y = x;
  for (size_t i = 0; i < y.size(); i += 3) y[i] = -y[i];
  return y;
}

}  // namespace tbg::molkit
