//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/targets/torsionwell.hpp"

#include <cmath>

#include "tbg/molkit/geometry.hpp"
#include "tbg/numcore/quadrature.hpp"

namespace tbg::targets {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TorsionDoubleWell::TorsionDoubleWell(double k1, double k2, double a)
    : k1_(k1), k2_(k2), a_(a) {
  if (k1 < 0.0 || k2 <= 0.0) throw contract_error("TorsionDoubleWell: bad stiffness");
}

double TorsionDoubleWell::potential(double phi) const {
  return k1_ * (1.0 + std::cos(phi - a_)) + k2_ * (1.0 + std::cos(2.0 * phi - 2.0 * a_ + kPi));
}

double TorsionDoubleWell::energy(const double* x) const {
  return sanitize_energy(potential(x[0]), 1e6);
}

void TorsionDoubleWell::gradient(const double* x, double* g) const {
  g[0] = -k1_ * std::sin(x[0] - a_) - 2.0 * k2_ * std::sin(2.0 * x[0] - 2.0 * a_ + kPi);
}

void TorsionDoubleWell::wrap(double* x) const { x[0] = molkit::wrap_angle(x[0]); }

double TorsionDoubleWell::deep_center() const { return molkit::wrap_angle(a_ - kPi); }

double TorsionDoubleWell::sample(numcore::Rng& rng) const {
  // U >= 0 with equality attained at the deep minimum, so exp(-U) <= 1.
  for (;;) {
    const double phi = rng.uniform(-kPi, kPi);
    if (rng.uniform() < std::exp(-potential(phi))) return phi;
  }
}

double TorsionDoubleWell::partition(int n) const {
  return numcore::simpson([this](double p) { return std::exp(-potential(p)); }, -kPi, kPi, n);
}

double TorsionDoubleWell::mass(double lo, double hi, int n) const {
  return numcore::simpson([this](double p) { return std::exp(-potential(p)); }, lo, hi, n);
}

double TorsionDoubleWell::well_delta_f(int n) const {
  // Integrate each well between the two barrier angles; the shallow well is
  // the arc through a, the deep well the arc through a - pi.
  const double lo = a_ - kPi / 2, hi = a_ + kPi / 2;
  const double shallow = mass(lo, hi, n);
  const double deep = mass(hi, lo + 2.0 * kPi, n);
  return -std::log(shallow) + std::log(deep);
}

}  // namespace tbg::targets
