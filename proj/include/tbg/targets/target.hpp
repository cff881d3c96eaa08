//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_TARGETS_TARGET_HPP
#define TBG_TARGETS_TARGET_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tbg/errors.hpp"

namespace tbg::targets {

// Flat row-major sample storage: count * dim doubles.
struct SampleBlock {
  int dim = 0;
  std::vector<double> data;

  long count() const { return dim > 0 ? static_cast<long>(data.size()) / dim : 0; }
  const double* row(long i) const { return data.data() + static_cast<size_t>(i) * dim; }
  double* row(long i) { return data.data() + static_cast<size_t>(i) * dim; }
  void push(const double* x) { data.insert(data.end(), x, x + dim); }
  void reserve_rows(long n) { data.reserve(static_cast<size_t>(n) * dim); }
};

// Finite energies saturate at the cap so downstream log-weights stay
// orderable; genuine overflow becomes +inf (never NaN), flagging the sample.
inline double sanitize_energy(double u, double cap) {
  if (!std::isfinite(u)) return std::numeric_limits<double>::infinity();
  return u < cap ? u : cap;
}

// A distribution known through its energy U(x) in units of k_BT, i.e.
// density proportional to exp(-U(x)).
class BoltzmannTarget {
 public:
  virtual ~BoltzmannTarget() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  // Energy in k_BT; finite or +inf, never NaN.
  virtual double energy(const double* x) const = 0;
  virtual void gradient(const double* x, double* g) const = 0;
  // Reduce periodic coordinates to the fundamental domain (default: none).
  virtual void wrap(double* /*x*/) const {}
  virtual double temperature() const { return 1.0; }

  double energy(const std::vector<double>& x) const {
    check(x);
    return energy(x.data());
  }
  std::vector<double> gradient(const std::vector<double>& x) const {
    check(x);
    std::vector<double> g(x.size());
    gradient(x.data(), g.data());
    return g;
  }

 private:
  void check(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim())
      throw contract_error(name() + ": coordinate dimension mismatch");
  }
};

}  // namespace tbg::targets

#endif  // TBG_TARGETS_TARGET_HPP
