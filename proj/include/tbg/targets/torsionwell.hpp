//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_TARGETS_TORSIONWELL_HPP
#define TBG_TARGETS_TORSIONWELL_HPP

#include <string>

#include "tbg/numcore/rng.hpp"
#include "tbg/targets/target.hpp"

namespace tbg::targets {

// 1-D circular double well
//   U(phi) = k1*(1 + cos(phi - a)) + k2*(1 + cos(2*phi - 2*a + pi)),
// with minima at phi = a (shallow, energy 2*k1) and phi = a - pi (deep,
// energy exactly 0) and barriers at a +- pi/2. Density ~ exp(-U) on (-pi, pi].
class TorsionDoubleWell : public BoltzmannTarget {
 public:
  TorsionDoubleWell(double k1, double k2, double a);

  std::string name() const override { return "torsion-double-well"; }
  int dim() const override { return 1; }
  double energy(const double* x) const override;
  void gradient(const double* x, double* g) const override;
  void wrap(double* x) const override;

  double potential(double phi) const;
  // Exact i.i.d. draw by rejection from the uniform circle (U >= 0, so the
  // unnormalized density is bounded by 1).
  double sample(numcore::Rng& rng) const;

  // Simpson quadrature over the circle (n subintervals).
  double partition(int n = 4096) const;
  double mass(double lo, double hi, int n = 4096) const;  // unnormalized
  // Free-energy difference F(shallow) - F(deep) between the two wells,
  // split at the barrier angles a - pi/2 and a + pi/2, in k_BT.
  double well_delta_f(int n = 4096) const;

  double shallow_center() const { return a_; }
  double deep_center() const;
  double k1() const { return k1_; }
  double k2() const { return k2_; }

 private:
  double k1_, k2_, a_;
};

}  // namespace tbg::targets

#endif  // TBG_TARGETS_TORSIONWELL_HPP
