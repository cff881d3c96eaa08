//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_MOLKIT_GEOMETRY_HPP
#define TBG_MOLKIT_GEOMETRY_HPP

#include <algorithm>
#include <cmath>

#include "tbg/molkit/topology.hpp"
#include "tbg/numcore/dual.hpp"

namespace tbg::molkit {

// Geometry kernels are templated on the scalar type so the same code path
// serves plain evaluation and forward-mode differentiation.

template <typename S>
S distance_t(const S* x, int i, int j) {
  const S dx = x[3 * i] - x[3 * j];
  const S dy = x[3 * i + 1] - x[3 * j + 1];
  const S dz = x[3 * i + 2] - x[3 * j + 2];
  using numcore::sqrt;
  return sqrt(dx * dx + dy * dy + dz * dz);
}

// Angle at j formed by i-j-k, in radians in [0, pi]. Computed via atan2 of
// (|cross|, dot), which stays differentiable away from the degenerate
// collinear-with-zero-length cases.
template <typename S>
S angle_t(const S* x, int i, int j, int k) {
  S u[3], v[3];
  for (int c = 0; c < 3; ++c) {
    u[c] = x[3 * i + c] - x[3 * j + c];
    v[c] = x[3 * k + c] - x[3 * j + c];
  }
  const S cx = u[1] * v[2] - u[2] * v[1];
  const S cy = u[2] * v[0] - u[0] * v[2];
  const S cz = u[0] * v[1] - u[1] * v[0];
  using numcore::atan2;
  using numcore::sqrt;
  const S s = sqrt(cx * cx + cy * cy + cz * cz);
  const S d = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return atan2(s, d);
}

// Signed dihedral of the chain i-j-k-l in (-pi, pi]. The sign convention
// satisfies torsion(i,j,k,l) == -torsion(l,k,j,i) up to the 2*pi wrap at pi.
template <typename S>
S torsion_t(const S* x, int i, int j, int k, int l) {
  S b1[3], b2[3], b3[3];
  for (int c = 0; c < 3; ++c) {
    b1[c] = x[3 * j + c] - x[3 * i + c];
    b2[c] = x[3 * k + c] - x[3 * j + c];
    b3[c] = x[3 * l + c] - x[3 * k + c];
  }
  S n1[3], n2[3];
  n1[0] = b1[1] * b2[2] - b1[2] * b2[1];
  n1[1] = b1[2] * b2[0] - b1[0] * b2[2];
  n1[2] = b1[0] * b2[1] - b1[1] * b2[0];
  n2[0] = b2[1] * b3[2] - b2[2] * b3[1];
  n2[1] = b2[2] * b3[0] - b2[0] * b3[2];
  n2[2] = b2[0] * b3[1] - b2[1] * b3[0];
  using numcore::atan2;
  using numcore::sqrt;
  const S b2n = sqrt(b2[0] * b2[0] + b2[1] * b2[1] + b2[2] * b2[2]);
  S m[3];
  m[0] = n1[1] * n2[2] - n1[2] * n2[1];
  m[1] = n1[2] * n2[0] - n1[0] * n2[2];
  m[2] = n1[0] * n2[1] - n1[1] * n2[0];
  const S y = (m[0] * b2[0] + m[1] * b2[1] + m[2] * b2[2]) / b2n;
  const S c = n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2];
  return atan2(y, c);
}

double distance(const Coords& x, int i, int j);
double angle(const Coords& x, int i, int j, int k);
double torsion(const Coords& x, int i, int j, int k, int l);

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

// Smallest absolute angular difference between two angles.
double angular_distance(double a, double b);

// Places atom D given anchor A (bond), B (angle) and C (torsion) so that
// |D-A| = bond, angle(D,A,B) = ang, torsion(D,A,B,C) = tors.
void place_atom(Coords& x, int d, int a, int b, int c, double bond, double ang, double tors);

// One internal-coordinate placement row for chain construction. Atoms 0..2
// are seeded explicitly; every later atom references three earlier ones.
struct ZEntry {
  int atom = -1;
  int ref_bond = -1;    // A
  int ref_angle = -1;   // B
  int ref_torsion = -1; // C
  double bond = 0.0;
  double angle = 0.0;
  double torsion = 0.0;
};

// Builds Cartesian coordinates from placement rows. The first three atoms
// are synthesized from the first two rows' bond/angle values.
Coords build_from_internal(int n_atoms, const std::vector<ZEntry>& rows);

}  // namespace tbg::molkit

#endif  // TBG_MOLKIT_GEOMETRY_HPP
