//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "tbg/numcore/ode.hpp"

#include <algorithm>
#include <cmath>

#include "tbg/errors.hpp"

namespace tbg::numcore {

namespace {

void check_state(const std::vector<double>& y, const char* where) {
  for (double v : y)
    if (!std::isfinite(v)) throw numeric_error(std::string(where) + ": non-finite state");
}

void rk4_step(const OdeRhs& rhs, int dim, double t, double h, std::vector<double>& y,
              std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
              std::vector<double>& k4, std::vector<double>& tmp) {
  rhs(t, y.data(), k1.data());
  for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, tmp.data(), k2.data());
  for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, tmp.data(), k3.data());
  for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(t + h, tmp.data(), k4.data());
  for (int i = 0; i < dim; ++i)
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

OdeResult rk4_integrate(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                        double t0, double t1, int steps) {
  std::vector<std::vector<double>> unused;
  OdeResult r;
  if (steps <= 0) throw contract_error("rk4_integrate: steps must be positive");
  if (static_cast<int>(y0.size()) != dim) throw contract_error("rk4_integrate: y0 size mismatch");
  std::vector<double> y = y0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  const double h = (t1 - t0) / steps;
  for (int s = 0; s < steps; ++s) {
    rk4_step(rhs, dim, t0 + s * h, h, y, k1, k2, k3, k4, tmp);
  }
  check_state(y, "rk4_integrate");
  r.y = std::move(y);
  r.n_steps = steps;
  r.n_evals = 4 * steps;
  return r;
}

OdeResult rk4_path(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                   double t0, double t1, int steps, std::vector<std::vector<double>>& path) {
  if (steps <= 0) throw contract_error("rk4_path: steps must be positive");
  if (static_cast<int>(y0.size()) != dim) throw contract_error("rk4_path: y0 size mismatch");
  OdeResult r;
  path.assign(static_cast<size_t>(steps) + 1, std::vector<double>());
  std::vector<double> y = y0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  path[0] = y;
  const double h = (t1 - t0) / steps;
  for (int s = 0; s < steps; ++s) {
    rk4_step(rhs, dim, t0 + s * h, h, y, k1, k2, k3, k4, tmp);
    path[static_cast<size_t>(s) + 1] = y;
  }
  check_state(y, "rk4_path");
  r.y = std::move(y);
  r.n_steps = steps;
  r.n_evals = 4 * steps;
  return r;
}

OdeResult dopri5_integrate(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                           double t0, double t1, const OdeOptions& opt) {
  if (static_cast<int>(y0.size()) != dim) throw contract_error("dopri5: y0 size mismatch");

  // Dormand-Prince 5(4) coefficients.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // Error weights: 5th-order solution minus the embedded 4th-order one.
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeResult r;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  double h = opt.h_init != 0.0 ? opt.h_init : (t1 - t0) / 100.0;
  if (h == 0.0) {
    r.y = y0;
    return r;
  }

  std::vector<double> y = y0, ynew(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim),
      k6(dim), k7(dim), tmp(dim);
  rhs(t, y.data(), k1.data());
  ++r.n_evals;

  while (dir * (t1 - t) > 0.0) {
    if (r.n_steps + r.n_rejected > opt.max_steps)
      throw numeric_error("dopri5: step limit exceeded");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;

    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, tmp.data(), k2.data());
    for (int i = 0; i < dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, tmp.data(), k3.data());
    for (int i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, tmp.data(), k4.data());
    for (int i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, tmp.data(), k5.data());
    for (int i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, tmp.data(), k6.data());
    for (int i = 0; i < dim; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew.data(), k7.data());
    r.n_evals += 6;

    double err = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / dim);

    if (!std::isfinite(err)) throw numeric_error("dopri5: non-finite error estimate");

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      ++r.n_steps;
    } else {
      ++r.n_rejected;
    }
    const double fac = std::clamp(0.9 * std::pow(err > 0.0 ? err : 1e-16, -0.2), 0.2, 5.0);
    h *= fac;
  }
  check_state(y, "dopri5");
  r.y = std::move(y);
  return r;
}

OdeResult rk_integrate(const OdeRhs& rhs, int dim, const std::vector<double>& y0,
                       double t0, double t1, const OdeOptions& opt) {
  if (opt.scheme == OdeScheme::kRk4) return rk4_integrate(rhs, dim, y0, t0, t1, opt.steps);
  return dopri5_integrate(rhs, dim, y0, t0, t1, opt);
}

}  // namespace tbg::numcore
