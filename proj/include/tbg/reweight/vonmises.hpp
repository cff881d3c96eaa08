//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_REWEIGHT_VONMISES_HPP
#define TBG_REWEIGHT_VONMISES_HPP

#include <vector>

namespace tbg::reweight {

// Modified Bessel function of the first kind, order zero. Power series for
// small arguments, asymptotic expansion beyond; relative accuracy ~1e-14
// over x in [0, 700]. log_bessel_i0 stays finite past the overflow point.
double bessel_i0(double x);
double log_bessel_i0(double x);

// Circular density f(phi) = exp(kappa*cos(phi-mu)) / (2*pi*I0(kappa)),
// evaluated in log space so large kappa cannot overflow.
double vonmises_pdf(double phi, double mu, double kappa);

// Per-frame bias weights w(phi) = r * f(phi | mu, kappa) + 1 that upweight
// an underpopulated torsion mode. r is chosen so the positive-phi and
// negative-phi halves carry (nearly) equal total weight:
//
//   r = (#negative - #positive) / sum_{phi >= 0} f(phi),   clamped at r >= 0,
//
// exact on the positive side, off on the negative side only by the density's
// mass at negative angles (tiny for the default mu=1, kappa=10). With no
// positive-phi frames r is undefined and the weights fall back to all ones;
// r_out (when given) receives the value used, 0 in the fallback.
std::vector<double> vonmises_bias_weights(const std::vector<double>& phi, double mu = 1.0,
                                          double kappa = 10.0, double* r_out = nullptr);

}  // namespace tbg::reweight

#endif  // TBG_REWEIGHT_VONMISES_HPP
