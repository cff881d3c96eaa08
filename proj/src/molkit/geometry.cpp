//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/molkit/geometry.hpp"

#include <cmath>

namespace tbg::molkit {

double distance(const Coords& x, int i, int j) { return distance_t(x.data(), i, j); }
double angle(const Coords& x, int i, int j, int k) { return angle_t(x.data(), i, j, k); }
double torsion(const Coords& x, int i, int j, int k, int l) {
  return torsion_t(x.data(), i, j, k, l);
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

double angular_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

namespace {

void cross3(const double* u, const double* v, double* w) {
  w[0] = u[1] * v[2] - u[2] * v[1];
  w[1] = u[2] * v[0] - u[0] * v[2];
  w[2] = u[0] * v[1] - u[1] * v[0];
}

double norm3(const double* u) { return std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]); }

void normalize3(double* u, const char* what) {
  const double n = norm3(u);
  if (n < 1e-12) throw contract_error(std::string("place_atom: degenerate frame (") + what + ")");
  for (int c = 0; c < 3; ++c) u[c] /= n;
}

}  // namespace

void place_atom(Coords& x, int d, int a, int b, int c, double bond, double ang, double tors) {
  const double* A = atom_xyz(x, a);
  const double* B = atom_xyz(x, b);
  const double* C = atom_xyz(x, c);

  double cb[3], ba_hat[3];
  for (int k = 0; k < 3; ++k) {
    cb[k] = B[k] - C[k];
    ba_hat[k] = A[k] - B[k];
  }
  normalize3(ba_hat, "bond axis");
  double n_hat[3];
  cross3(cb, ba_hat, n_hat);
  normalize3(n_hat, "plane normal");
  double m_hat[3];
  cross3(n_hat, ba_hat, m_hat);

  const double lx = -bond * std::cos(ang);
  const double ly = bond * std::sin(ang) * std::cos(tors);
  const double lz = bond * std::sin(ang) * std::sin(tors);
  double* D = atom_xyz(x, d);
  for (int k = 0; k < 3; ++k) D[k] = A[k] + lx * ba_hat[k] + ly * m_hat[k] + lz * n_hat[k];
}

Coords build_from_internal(int n_atoms, const std::vector<ZEntry>& rows) {
  if (n_atoms < 1) throw contract_error("build_from_internal: need at least one atom");
  Coords x(static_cast<size_t>(3 * n_atoms), 0.0);
  std::vector<bool> placed(static_cast<size_t>(n_atoms), false);
  placed[0] = true;  // origin

  for (const auto& r : rows) {
    if (r.atom <= 0 || r.atom >= n_atoms) throw contract_error("build_from_internal: bad atom index");
    if (placed[static_cast<size_t>(r.atom)])
      throw contract_error("build_from_internal: atom placed twice");
    auto need = [&](int ref) {
      if (ref < 0 || !placed[static_cast<size_t>(ref)])
        throw contract_error("build_from_internal: reference atom not yet placed");
    };
    double* D = atom_xyz(x, r.atom);
    if (r.ref_angle < 0) {
      // bond only: along +x from the bond reference
      need(r.ref_bond);
      const double* A = atom_xyz(x, r.ref_bond);
      D[0] = A[0] + r.bond;
      D[1] = A[1];
      D[2] = A[2];
    } else if (r.ref_torsion < 0) {
      // bond + angle: placed in the xy-plane
      need(r.ref_bond);
      need(r.ref_angle);
      const double* A = atom_xyz(x, r.ref_bond);
      const double* B = atom_xyz(x, r.ref_angle);
      double u[3] = {B[0] - A[0], B[1] - A[1], B[2] - A[2]};
      normalize3(u, "angle axis");
      // rotate u by `angle` about z through A
      const double ca = std::cos(r.angle), sa = std::sin(r.angle);
      D[0] = A[0] + r.bond * (ca * u[0] - sa * u[1]);
      D[1] = A[1] + r.bond * (sa * u[0] + ca * u[1]);
      D[2] = A[2];
    } else {
      need(r.ref_bond);
      need(r.ref_angle);
      need(r.ref_torsion);
      place_atom(x, r.atom, r.ref_bond, r.ref_angle, r.ref_torsion, r.bond, r.angle, r.torsion);
    }
    placed[static_cast<size_t>(r.atom)] = true;
  }
  for (int i = 0; i < n_atoms; ++i)
    if (!placed[static_cast<size_t>(i)])
      throw contract_error("build_from_internal: atom " + std::to_string(i) + " never placed");
  return x;
}

}  // namespace tbg::molkit
